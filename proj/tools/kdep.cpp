// kdep: kernel dependence estimation front end.
//
// Subcommands: test, sensitivity, rank, causal, bench. Machine-readable
// JSON records go to stdout, one object per line; tabular outputs are CSV.
// Exit codes: 0 success, 2 input error, 3 degenerate data.

#include "kdep/kdep.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using json = nlohmann::ordered_json;
using namespace kdep;

constexpr int kExitInputError = 2;
constexpr int kExitDegenerate = 3;

struct CommonOptions {
    std::string method = "hsic";
    Index features = 30;            // random feature count D
    double alpha = 0.05;
    int permutations = 200;
    std::uint64_t seed = 0;
    std::string bandwidth = "auto-mean";
    bool standardize = false;
    std::string null = "permutation";
    bool timings = false;
};

void add_common(CLI::App* cmd, CommonOptions& opt) {
    cmd->add_option("--method", opt.method, "Dependence statistic")
        ->check(CLI::IsMember({"hsic", "rhsic"}));
    cmd->add_option("--features", opt.features, "Random feature count D (rhsic)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--alpha", opt.alpha, "Significance level")
        ->check(CLI::Range(1e-12, 1.0 - 1e-12));
    cmd->add_option("--permutations", opt.permutations, "Permutation count B")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--seed", opt.seed, "Root RNG seed");
    cmd->add_option("--bandwidth", opt.bandwidth,
                    "auto-mean | auto-median | fixed positive value");
    cmd->add_flag("--standardize", opt.standardize, "Z-score input columns first");
    cmd->add_option("--null", opt.null, "Null model used for threshold and p-value")
        ->check(CLI::IsMember({"permutation", "gamma"}));
    cmd->add_flag("--timings", opt.timings, "Include wall times in the output record");
}

Method parse_method(const std::string& m) {
    return m == "rhsic" ? Method::RHSIC : Method::HSIC;
}

Bandwidth resolve_bandwidth(const DataMatrix& M, const std::string& arg) {
    if (arg == "auto-mean") return bandwidth_heuristic(M, BandwidthHeuristic::MeanDistance);
    if (arg == "auto-median") return bandwidth_heuristic(M, BandwidthHeuristic::MedianDistance);
    double sigma = 0.0;
    std::istringstream ss(arg);
    if (!(ss >> sigma) || !(sigma > 0.0))
        throw CLI::ValidationError("--bandwidth must be auto-mean, auto-median or a positive value");
    return fixed_bandwidth(sigma);
}

void standardize_columns(DataMatrix& M) {
    for (Index j = 0; j < M.cols(); ++j) {
        const double mean = M.col(j).mean();
        M.col(j).array() -= mean;
        const double sd = std::sqrt(M.col(j).squaredNorm() /
                                    std::max<double>(1.0, static_cast<double>(M.rows() - 1)));
        if (sd > 0.0) M.col(j) /= sd;
    }
}

DataMatrix load_variable(const std::string& file, bool standardize) {
    DataMatrix M = read_csv(file).values;
    require_finite(M, file.c_str());
    if (standardize) standardize_columns(M);
    return M;
}

struct LoadedPair {
    DataMatrix X, Y;
    Bandwidth sigmaX, sigmaY;
};

LoadedPair load_pair(const std::string& xfile, const std::string& yfile,
                     const CommonOptions& opt) {
    LoadedPair p;
    p.X = load_variable(xfile, opt.standardize);
    p.Y = load_variable(yfile, opt.standardize);
    if (p.X.rows() != p.Y.rows())
        throw RowCountMismatch(xfile + " and " + yfile + " have different row counts (" +
                               std::to_string(p.X.rows()) + " vs " + std::to_string(p.Y.rows()) +
                               ")");
    p.sigmaX = resolve_bandwidth(p.X, opt.bandwidth);
    p.sigmaY = resolve_bandwidth(p.Y, opt.bandwidth);
    return p;
}

TestConfig make_test_config(const CommonOptions& opt) {
    TestConfig cfg;
    cfg.method = parse_method(opt.method);
    cfg.permutations = opt.permutations;
    cfg.seed = opt.seed;
    cfg.D = opt.features;
    return cfg;
}

int cmd_test(const std::string& xfile, const std::string& yfile, const CommonOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    const LoadedPair p = load_pair(xfile, yfile, opt);
    const TestConfig cfg = make_test_config(opt);
    const NullKind inference =
        opt.null == "gamma" ? NullKind::GammaMomentMatched : NullKind::Permutation;
    const DependenceResult r =
        independence_test(p.X, p.Y, p.sigmaX, p.sigmaY, cfg, opt.alpha, inference);

    json rec;
    rec["method"] = method_name(r.statistic.method);
    rec["statistic"] = std::max(r.statistic.value, 0.0);
    rec["statisticRaw"] = r.statistic.value;
    rec["pValue"] = r.pValue;
    rec["threshold"] = r.thresholdValue;
    rec["reject"] = r.reject;
    rec["n"] = r.statistic.n;
    if (r.statistic.D) rec["D"] = *r.statistic.D;
    rec["sigmaX"] = r.statistic.sigmaX;
    rec["sigmaY"] = r.statistic.sigmaY;
    rec["alpha"] = r.alpha;
    rec["null"] = opt.null;
    rec["permutations"] = opt.permutations;
    rec["seed"] = opt.seed;
    if (opt.timings)
        rec["wallTimeMs"] = std::chrono::duration<double, std::milli>(
                                std::chrono::steady_clock::now() - t0)
                                .count();
    std::cout << rec.dump() << "\n";
    return 0;
}

int cmd_sensitivity(const std::string& xfile, const std::string& yfile,
                    const std::string& outPrefix, const CommonOptions& opt) {
    const LoadedPair p = load_pair(xfile, yfile, opt);
    const Method method = parse_method(opt.method);

    SensitivityMap S;
    if (method == Method::HSIC) {
        S = hsic_sensitivity(p.X, p.Y, p.sigmaX, p.sigmaY);
    } else {
        const FrequencyMatrix Wx =
            sample_frequencies(p.X.cols(), opt.features, p.sigmaX, substream_seed(opt.seed, 0));
        const FrequencyMatrix Wy =
            sample_frequencies(p.Y.cols(), opt.features, p.sigmaY, substream_seed(opt.seed, 1));
        const FeatureMap Zx = center_features(feature_map(p.X, Wx));
        const FeatureMap Zy = center_features(feature_map(p.Y, Wy));
        S = rhsic_sensitivity(p.X, p.Y, Zx, Zy);
    }
    const SensitivityAggregate agg = aggregate(S);

    std::vector<std::string> hx, hy;
    for (Index j = 0; j < S.Sx.cols(); ++j) hx.push_back("x" + std::to_string(j + 1));
    for (Index j = 0; j < S.Sy.cols(); ++j) hy.push_back("y" + std::to_string(j + 1));
    write_csv(outPrefix + "_Sx.csv", S.Sx, hx);
    write_csv(outPrefix + "_Sy.csv", S.Sy, hy);

    std::ofstream aggOut(outPrefix + "_aggregates.csv");
    if (!aggOut) throw std::runtime_error("cannot open " + outPrefix + "_aggregates.csv");
    aggOut << "kind,index,value\n";
    for (Index i = 0; i < agg.perSample.size(); ++i)
        aggOut << "perSample," << i << "," << format_double(agg.perSample(i)) << "\n";
    for (Index i = 0; i < agg.sampleNorms.size(); ++i)
        aggOut << "sampleNorm," << i << "," << format_double(agg.sampleNorms(i)) << "\n";
    for (Index j = 0; j < agg.perFeature.size(); ++j)
        aggOut << "perFeature," << j << "," << format_double(agg.perFeature(j)) << "\n";

    json rec;
    rec["method"] = method_name(method);
    rec["n"] = S.Sx.rows();
    rec["dx"] = S.Sx.cols();
    rec["dy"] = S.Sy.cols();
    rec["outPrefix"] = outPrefix;
    rec["seed"] = opt.seed;
    std::cout << rec.dump() << "\n";
    return 0;
}

int cmd_rank(const std::string& xfile, const std::string& yfile, const std::string& criterion,
             Index nf, const CommonOptions& opt) {
    const LoadedPair p = load_pair(xfile, yfile, opt);
    if (nf > p.X.cols())
        throw ShapeMismatch("--nf exceeds the number of features in " + xfile);
    RankCriterion crit = RankCriterion::HsicPerFeature;
    if (criterion == "sensitivity") crit = RankCriterion::SensitivityPerFeature;
    if (criterion == "pearson") crit = RankCriterion::PearsonAbs;
    const FeatureRanking ranking = rank_features(p.X, p.Y, crit);

    json rec;
    rec["criterion"] = criterion;
    rec["n"] = p.X.rows();
    rec["d"] = p.X.cols();
    rec["scores"] = std::vector<double>(ranking.scores.data(),
                                        ranking.scores.data() + ranking.scores.size());
    rec["order"] = ranking.order;
    rec["selected"] = std::vector<Index>(ranking.order.begin(),
                                         ranking.order.begin() + (nf > 0 ? nf : p.X.cols()));
    rec["seed"] = opt.seed;
    std::cout << rec.dump() << "\n";
    return 0;
}

void write_curve(const std::string& path, const std::vector<CurvePoint>& curve) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "threshold,fpr,tpr,precision,recall\n";
    for (const CurvePoint& pt : curve)
        out << format_double(pt.threshold) << "," << format_double(pt.fpr) << ","
            << format_double(pt.tpr) << "," << format_double(pt.precision) << ","
            << format_double(pt.recall) << "\n";
}

int cmd_causal(const std::string& pairdir, const std::string& metafile,
               const std::string& outPrefix, const CommonOptions& opt) {
    const std::vector<CausalPair> pairs = read_causal_pairs(pairdir, metafile);
    CausalConfig cfg;
    cfg.method = parse_method(opt.method);
    cfg.D = opt.features;
    cfg.seed = opt.seed;
    const CausalRankResult result = causal_rank(pairs, cfg);

    if (!outPrefix.empty()) {
        write_curve(outPrefix + "_roc_C.csv", result.evalC.curve);
        write_curve(outPrefix + "_roc_Cs.csv", result.evalCs.curve);
    }

    json rec;
    rec["method"] = method_name(cfg.method);
    rec["nPairs"] = pairs.size();
    rec["aucC"] = result.evalC.auc;
    rec["aucCs"] = result.evalCs.auc;
    json decisions = json::array();
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const CausalDecision& d = result.decisions[i];
        json dj;
        dj["id"] = pairs[i].id;
        dj["scoreC"] = d.scoreC;
        dj["scoreCs"] = d.scoreCs;
        // scoreC < 0 (forward residuals more independent) means x -> y
        dj["direction"] = d.direction == Direction::XcausesY ? "1->2" : "2->1";
        dj["weight"] = pairs[i].weight;
        decisions.push_back(dj);
    }
    rec["decisions"] = decisions;
    rec["seed"] = opt.seed;
    std::cout << rec.dump() << "\n";
    return 0;
}

int cmd_bench(const std::vector<Index>& sizes, const std::vector<Index>& dgrid,
              std::uint64_t seed, Index maxExact, const std::string& outFile) {
    std::ostringstream csv;
    csv << "n,D,hsic,rhsic,hsic_ms,rhsic_ms,abs_error,sens_frob_error\n";
    for (Index n : sizes)
        for (Index D : dgrid) {
            const BenchRow row = bench_row(n, D, seed, maxExact);
            csv << row.n << "," << row.D << "," << format_double(row.hsicValue) << ","
                << format_double(row.rhsicValue) << "," << format_double(row.hsicMs) << ","
                << format_double(row.rhsicMs) << "," << format_double(row.rhsicAbsError) << ","
                << format_double(row.sensFrobError) << "\n";
        }
    if (outFile.empty()) {
        std::cout << csv.str();
    } else {
        std::ofstream out(outFile);
        if (!out) throw std::runtime_error("cannot open " + outFile);
        out << csv.str();
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kernel dependence estimation: HSIC, RHSIC, independence tests, "
                 "sensitivity maps, feature ranking and causal direction scoring"};
    app.require_subcommand(1);

    CommonOptions opt;
    std::string xfile, yfile, outPrefix, criterion = "hsic", pairdir, metafile, outFile;
    Index nf = 0;
    std::vector<Index> sizes{100};
    std::vector<Index> dgrid{30};
    Index maxExact = 8192;

    auto* test = app.add_subcommand("test", "Independence test between two CSV variables");
    test->add_option("xfile", xfile)->required();
    test->add_option("yfile", yfile)->required();
    add_common(test, opt);

    auto* sens = app.add_subcommand("sensitivity", "Write sensitivity maps and aggregates");
    sens->add_option("xfile", xfile)->required();
    sens->add_option("yfile", yfile)->required();
    sens->add_option("--out", outPrefix, "Output file prefix")->required();
    add_common(sens, opt);

    auto* rank = app.add_subcommand("rank", "Filter feature ranking against a response");
    rank->add_option("xfile", xfile)->required();
    rank->add_option("yfile", yfile)->required();
    rank->add_option("--criterion", criterion, "hsic | sensitivity | pearson")
        ->check(CLI::IsMember({"hsic", "sensitivity", "pearson"}));
    rank->add_option("--nf", nf, "Number of top features to select");
    add_common(rank, opt);

    auto* causal = app.add_subcommand("causal", "Causal direction scoring over a pair collection");
    causal->add_option("pairdir", pairdir)->required();
    causal->add_option("metafile", metafile)->required();
    causal->add_option("--out", outPrefix, "Curve file prefix");
    add_common(causal, opt);

    auto* bench = app.add_subcommand("bench", "Convergence and runtime measurements");
    bench->add_option("--sizes", sizes, "Sample sizes n")->delimiter(',');
    bench->add_option("--features", dgrid, "Feature counts D")->delimiter(',');
    bench->add_option("--seed", opt.seed, "Root RNG seed");
    bench->add_option("--max-exact", maxExact, "Largest n for the exact HSIC columns");
    bench->add_option("--out", outFile, "Output CSV file (stdout when omitted)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (test->parsed()) return cmd_test(xfile, yfile, opt);
        if (sens->parsed()) return cmd_sensitivity(xfile, yfile, outPrefix, opt);
        if (rank->parsed()) return cmd_rank(xfile, yfile, criterion, nf, opt);
        if (causal->parsed()) return cmd_causal(pairdir, metafile, outPrefix, opt);
        if (bench->parsed()) return cmd_bench(sizes, dgrid, opt.seed, maxExact, outFile);
    } catch (const kdep::CsvParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const kdep::AllSamplesIdentical& e) {
        std::cerr << "degenerate data: " << e.what() << "\n";
        return kExitDegenerate;
    } catch (const kdep::DegenerateNull& e) {
        std::cerr << "degenerate data: " << e.what() << "\n";
        return kExitDegenerate;
    } catch (const kdep::ZeroVariance& e) {
        std::cerr << "degenerate data: " << e.what() << "\n";
        return kExitDegenerate;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
