#pragma once

#include "kdep/apps.hpp"
#include "kdep/types.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace kdep {

struct CsvParseError : std::runtime_error {
    CsvParseError(const std::string& file, std::size_t line, const std::string& what)
        : std::runtime_error(file + ":" + std::to_string(line) + ": " + what) {}
};

struct CsvTable {
    Matrix values;
    std::vector<std::string> header;   // empty when the file had none
};

namespace detail {

inline std::vector<std::string> split_fields(const std::string& line, char delim) {
    std::vector<std::string> fields;
    if (delim == ' ') {
        std::istringstream ss(line);
        std::string tok;
        while (ss >> tok) fields.push_back(tok);
        return fields;
    }
    std::string tok;
    std::istringstream ss(line);
    while (std::getline(ss, tok, delim)) fields.push_back(tok);
    return fields;
}

inline bool parse_double(const std::string& s, double& out) {
    try {
        std::size_t pos = 0;
        out = std::stod(s, &pos);
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
        return pos == s.size();
    } catch (const std::exception&) {
        return false;
    }
}

}  // namespace detail

// Headerless or single-header-row table of decimal numbers. A header is
// assumed when any field of the first line fails to parse as a number.
inline CsvTable read_csv(const std::string& path, char delim = ',') {
    std::ifstream in(path);
    if (!in) throw CsvParseError(path, 0, "cannot open file");
    std::vector<std::vector<double>> rows;
    CsvTable table;
    std::string line;
    std::size_t lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto fields = detail::split_fields(line, delim);
        if (fields.empty()) continue;
        std::vector<double> row(fields.size());
        bool numeric = true;
        for (std::size_t j = 0; j < fields.size(); ++j)
            if (!detail::parse_double(fields[j], row[j])) {
                numeric = false;
                break;
            }
        if (!numeric) {
            if (lineNo == 1 && rows.empty()) {
                table.header = fields;
                continue;
            }
            throw CsvParseError(path, lineNo, "non-numeric cell");
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw CsvParseError(path, lineNo, "inconsistent column count");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw CsvParseError(path, lineNo, "no data rows");
    table.values.resize(static_cast<Index>(rows.size()), static_cast<Index>(rows[0].size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            table.values(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    return table;
}

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Full double precision so the files re-parse to the in-memory values.
inline void write_csv(const std::string& path, const Matrix& M,
                      const std::vector<std::string>& header = {}) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_csv: cannot open " + path);
    if (!header.empty()) {
        for (std::size_t j = 0; j < header.size(); ++j)
            out << (j ? "," : "") << header[j];
        out << "\n";
    }
    for (Index i = 0; i < M.rows(); ++i) {
        for (Index j = 0; j < M.cols(); ++j)
            out << (j ? "," : "") << format_double(M(i, j));
        out << "\n";
    }
}

// ---------------------------------------------------------------------------
// Cause-effect pair collection layout: two whitespace-separated columns per
// pair file plus a metadata CSV (id, direction in {1->2, 2->1}, weight).
// ---------------------------------------------------------------------------

struct PairMeta {
    std::string id;
    Direction truth = Direction::XcausesY;
    double weight = 1.0;
};

inline std::vector<PairMeta> read_pair_metadata(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CsvParseError(path, 0, "cannot open file");
    std::vector<PairMeta> metas;
    std::string line;
    std::size_t lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto fields = detail::split_fields(line, ',');
        if (fields.empty()) continue;
        if (lineNo == 1 && fields[0] == "id") continue;   // optional header
        if (fields.size() < 2)
            throw CsvParseError(path, lineNo, "expected id,direction[,weight]");
        PairMeta meta;
        meta.id = fields[0];
        if (fields[1] == "1->2")
            meta.truth = Direction::XcausesY;
        else if (fields[1] == "2->1")
            meta.truth = Direction::YcausesX;
        else
            throw CsvParseError(path, lineNo, "direction must be 1->2 or 2->1");
        if (fields.size() >= 3 && !fields[2].empty()) {
            if (!detail::parse_double(fields[2], meta.weight) || !(meta.weight > 0.0))
                throw CsvParseError(path, lineNo, "weight must be a positive number");
        }
        metas.push_back(std::move(meta));
    }
    return metas;
}

inline std::string resolve_pair_file(const std::string& dir, const std::string& id) {
    namespace fs = std::filesystem;
    const fs::path direct = fs::path(dir) / id;
    if (fs::exists(direct)) return direct.string();
    const fs::path withExt = fs::path(dir) / (id + ".txt");
    if (fs::exists(withExt)) return withExt.string();
    throw CsvParseError(direct.string(), 0, "pair file not found");
}

inline std::vector<CausalPair> read_causal_pairs(const std::string& dir,
                                                 const std::string& metaFile) {
    std::vector<CausalPair> pairs;
    for (const PairMeta& meta : read_pair_metadata(metaFile)) {
        const CsvTable table = read_csv(resolve_pair_file(dir, meta.id), ' ');
        if (table.values.cols() != 2)
            throw CsvParseError(meta.id, 0, "pair files must have exactly two columns");
        CausalPair pair;
        pair.id = meta.id;
        pair.x = table.values.col(0);
        pair.y = table.values.col(1);
        pair.truth = meta.truth;
        pair.weight = meta.weight;
        pairs.push_back(std::move(pair));
    }
    return pairs;
}

}  // namespace kdep
