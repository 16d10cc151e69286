#pragma once

#include "kdep/apps.hpp"
#include "kdep/bench.hpp"
#include "kdep/hsic.hpp"
#include "kdep/io.hpp"
#include "kdep/kernel.hpp"
#include "kdep/nulltest.hpp"
#include "kdep/rff.hpp"
#include "kdep/sensmap.hpp"
#include "kdep/types.hpp"
