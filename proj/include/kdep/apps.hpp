#pragma once

#include "kdep/hsic.hpp"
#include "kdep/kernel.hpp"
#include "kdep/rff.hpp"
#include "kdep/sensmap.hpp"
#include "kdep/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace kdep {

// ---------------------------------------------------------------------------
// Filter feature ranking
// ---------------------------------------------------------------------------

enum class RankCriterion { HsicPerFeature, SensitivityPerFeature, PearsonAbs };

struct FeatureRanking {
    Vector scores;               // nonnegative criterion value per feature
    std::vector<Index> order;    // feature indices, descending score
    RankCriterion criterion = RankCriterion::HsicPerFeature;
};

inline double pearson(const Vector& x, const Vector& y) {
    if (x.size() != y.size())
        throw ShapeMismatch("pearson: vectors must have equal length");
    const double mx = x.mean();
    const double my = y.mean();
    const Vector cx = x.array() - mx;
    const Vector cy = y.array() - my;
    const double sx = cx.norm();
    const double sy = cy.norm();
    if (sx == 0.0 || sy == 0.0)
        throw ZeroVariance("pearson: a variable has zero variance");
    return cx.dot(cy) / (sx * sy);
}

struct RankConfig {
    BandwidthHeuristic heuristic = BandwidthHeuristic::MeanDistance;
};

// Scores every feature of X against a single response column y.
// HsicPerFeature: hsic(X_:j, y). SensitivityPerFeature: the x-block of the
// per-feature aggregate of hsic_sensitivity(X, y). PearsonAbs: |rho|.
// Ties break toward the lower feature index.
inline FeatureRanking rank_features(const DataMatrix& X, const DataMatrix& y,
                                    RankCriterion criterion, const RankConfig& cfg = {}) {
    if (y.cols() != 1)
        throw ShapeMismatch("rank_features: y must have exactly one column");
    if (X.rows() != y.rows())
        throw RowCountMismatch("rank_features: X and y must have the same number of rows");
    const Index d = X.cols();
    FeatureRanking ranking;
    ranking.criterion = criterion;
    ranking.scores.resize(d);

    switch (criterion) {
        case RankCriterion::HsicPerFeature: {
            const Bandwidth sy = bandwidth_heuristic(y, cfg.heuristic);
            for (Index j = 0; j < d; ++j) {
                const DataMatrix col = X.col(j);
                ranking.scores(j) = hsic(col, y, bandwidth_heuristic(col, cfg.heuristic), sy).value;
            }
            break;
        }
        case RankCriterion::SensitivityPerFeature: {
            const Bandwidth sx = bandwidth_heuristic(X, cfg.heuristic);
            const Bandwidth sy = bandwidth_heuristic(y, cfg.heuristic);
            const SensitivityAggregate agg = aggregate(hsic_sensitivity(X, y, sx, sy));
            ranking.scores = agg.perFeature.head(d);
            break;
        }
        case RankCriterion::PearsonAbs: {
            for (Index j = 0; j < d; ++j)
                ranking.scores(j) = std::abs(pearson(X.col(j), y.col(0)));
            break;
        }
    }

    ranking.order.resize(static_cast<std::size_t>(d));
    std::iota(ranking.order.begin(), ranking.order.end(), Index{0});
    std::stable_sort(ranking.order.begin(), ranking.order.end(),
                     [&](Index a, Index b) { return ranking.scores(a) > ranking.scores(b); });
    return ranking;
}

// ---------------------------------------------------------------------------
// Leave-one-out kNN regression
// ---------------------------------------------------------------------------

struct Regressor {
    enum class Kind { KNearestNeighbor };
    Kind kind = Kind::KNearestNeighbor;
    Index k = 0;   // 0 = default ceil(sqrt(n))
};

inline Index default_knn_k(Index n) {
    return static_cast<Index>(std::ceil(std::sqrt(static_cast<double>(n))));
}

// yhat_i = mean of y over the k nearest rows to x_i, excluding i itself.
// Distance ties break toward the lower sample index.
inline Vector knn_loo_predict(const DataMatrix& x, const Vector& y, Index k) {
    const Index n = x.rows();
    if (k < 1 || k >= n)
        throw std::invalid_argument("knn_loo_predict: need 1 <= k < n");
    if (y.size() != n)
        throw RowCountMismatch("knn_loo_predict: x and y must have the same length");
    const Matrix d2 = pairwise_squared_distances(x);
    Vector yhat(n);
    std::vector<Index> idx(static_cast<std::size_t>(n - 1));
    for (Index i = 0; i < n; ++i) {
        Index pos = 0;
        for (Index j = 0; j < n; ++j)
            if (j != i) idx[static_cast<std::size_t>(pos++)] = j;
        std::partial_sort(idx.begin(), idx.begin() + k, idx.end(), [&](Index a, Index b) {
            return d2(i, a) != d2(i, b) ? d2(i, a) < d2(i, b) : a < b;
        });
        double sum = 0.0;
        for (Index m = 0; m < k; ++m) sum += y(idx[static_cast<std::size_t>(m)]);
        yhat(i) = sum / static_cast<double>(k);
    }
    return yhat;
}

inline Vector knn_loo_residuals(const DataMatrix& x, const Vector& y, const Regressor& reg) {
    const Index k = reg.k > 0 ? reg.k : default_knn_k(x.rows());
    return y - knn_loo_predict(x, y, k);
}

// ---------------------------------------------------------------------------
// Additive-noise causal direction scoring
// ---------------------------------------------------------------------------

enum class Direction { XcausesY, YcausesX };

struct CausalDecision {
    double scoreC = 0.0;    // stat(x, r_f) - stat(y, r_b); < 0 favors x -> y
    double scoreCs = 0.0;   // (S_b^y + S_b^r) - (S_f^x + S_f^r); > 0 favors x -> y
    Direction direction = Direction::XcausesY;
    Vector forwardResiduals;
    Vector backwardResiduals;
    double SfX = 0.0, SfR = 0.0, SbY = 0.0, SbR = 0.0;
};

struct CausalConfig {
    Method method = Method::HSIC;
    Index D = 30;                     // RHSIC feature count
    std::uint64_t seed = 0;
    bool decideBySensitivity = false; // use scoreCs's sign instead of scoreC's
    BandwidthHeuristic heuristic = BandwidthHeuristic::MeanDistance;
};

namespace detail {

struct ResidualDependence {
    double stat = 0.0;
    double sensInput = 0.0;      // mean squared entry of the input-side block
    double sensResidual = 0.0;   // mean squared entry of the residual-side block
};

// Dependence between an input variable and a regression residual, with the
// mean-of-squares summaries of both sensitivity blocks.
inline ResidualDependence residual_dependence(const Vector& input, const Vector& residual,
                                              const CausalConfig& cfg, std::uint64_t seed) {
    const DataMatrix U = input;
    const DataMatrix R = residual;
    const Bandwidth su = bandwidth_heuristic(U, cfg.heuristic);
    const Bandwidth sr = bandwidth_heuristic(R, cfg.heuristic);
    ResidualDependence out;
    if (cfg.method == Method::HSIC) {
        out.stat = hsic(U, R, su, sr).value;
        const SensitivityMap S = hsic_sensitivity(U, R, su, sr);
        out.sensInput = S.Sx.array().square().mean();
        out.sensResidual = S.Sy.array().square().mean();
    } else {
        const FrequencyMatrix Wu = sample_frequencies(1, cfg.D, su, substream_seed(seed, 0));
        const FrequencyMatrix Wr = sample_frequencies(1, cfg.D, sr, substream_seed(seed, 1));
        const FeatureMap Zu = center_features(feature_map(U, Wu));
        const FeatureMap Zr = center_features(feature_map(R, Wr));
        out.stat = rhsic(Zu, Zr).value;
        const SensitivityMap S = rhsic_sensitivity(U, R, Zu, Zr);
        out.sensInput = S.Sx.array().square().mean();
        out.sensResidual = S.Sy.array().square().mean();
    }
    return out;
}

}  // namespace detail

// Fits forward (x -> y) and backward (y -> x) leave-one-out kNN regressions
// and scores the direction by residual independence.
inline CausalDecision causal_score(const Vector& x, const Vector& y, const CausalConfig& cfg,
                                   const Regressor& reg = {}) {
    if (x.size() != y.size())
        throw RowCountMismatch("causal_score: x and y must have the same length");
    CausalDecision dec;
    dec.forwardResiduals = knn_loo_residuals(x, y, reg);   // r_f = y - f(x)
    dec.backwardResiduals = knn_loo_residuals(y, x, reg);  // r_b = x - g(y)

    const auto fwd = detail::residual_dependence(x, dec.forwardResiduals, cfg,
                                                 substream_seed(cfg.seed, 10));
    const auto bwd = detail::residual_dependence(y, dec.backwardResiduals, cfg,
                                                 substream_seed(cfg.seed, 11));
    dec.scoreC = fwd.stat - bwd.stat;
    dec.SfX = fwd.sensInput;
    dec.SfR = fwd.sensResidual;
    dec.SbY = bwd.sensInput;
    dec.SbR = bwd.sensResidual;
    dec.scoreCs = (dec.SbY + dec.SbR) - (dec.SfX + dec.SfR);

    // more independent forward residuals mean scoreC < 0 and scoreCs > 0
    dec.direction = cfg.decideBySensitivity ? (dec.scoreCs > 0.0 ? Direction::XcausesY
                                                                 : Direction::YcausesX)
                                            : (dec.scoreC < 0.0 ? Direction::XcausesY
                                                                : Direction::YcausesX);
    return dec;
}

// ---------------------------------------------------------------------------
// Weighted ranked-decision evaluation (ROC / precision-recall / AUC)
// ---------------------------------------------------------------------------

struct ScoredDecision {
    std::string id;
    double score = 0.0;    // |score|; higher means more confident
    bool correct = false;
    double weight = 1.0;
};

struct CurvePoint {
    double threshold = 0.0;
    double fpr = 0.0;
    double tpr = 0.0;
    double precision = 1.0;
    double recall = 0.0;
};

struct RankedEvaluation {
    std::vector<ScoredDecision> decisions;   // sorted by score, descending
    std::vector<CurvePoint> curve;
    double auc = 0.0;
};

// Sweeps the confidence threshold over the sorted decisions; tied scores are
// consumed as one group. AUC is the trapezoid under the weighted ROC, which
// equals the weighted Mann-Whitney statistic with half-credit ties.
inline RankedEvaluation weighted_ranked_evaluation(std::vector<ScoredDecision> decisions) {
    RankedEvaluation eval;
    std::stable_sort(decisions.begin(), decisions.end(),
                     [](const ScoredDecision& a, const ScoredDecision& b) {
                         return a.score > b.score;
                     });
    double totalPos = 0.0, totalNeg = 0.0;
    for (const auto& d : decisions) {
        if (!(d.weight > 0.0))
            throw std::invalid_argument("weighted_ranked_evaluation: weights must be positive");
        (d.correct ? totalPos : totalNeg) += d.weight;
    }
    eval.decisions = decisions;
    eval.curve.push_back(CurvePoint{});

    double tp = 0.0, fp = 0.0, auc = 0.0;
    std::size_t i = 0;
    while (i < decisions.size()) {
        std::size_t j = i;
        double dTp = 0.0, dFp = 0.0;
        while (j < decisions.size() && decisions[j].score == decisions[i].score) {
            (decisions[j].correct ? dTp : dFp) += decisions[j].weight;
            ++j;
        }
        const double tprPrev = totalPos > 0.0 ? tp / totalPos : 0.0;
        tp += dTp;
        fp += dFp;
        const double tpr = totalPos > 0.0 ? tp / totalPos : 0.0;
        const double fpr = totalNeg > 0.0 ? fp / totalNeg : 0.0;
        if (totalNeg > 0.0) auc += (dFp / totalNeg) * 0.5 * (tprPrev + tpr);
        CurvePoint pt;
        pt.threshold = decisions[i].score;
        pt.tpr = tpr;
        pt.fpr = fpr;
        pt.recall = tpr;
        pt.precision = (tp + fp) > 0.0 ? tp / (tp + fp) : 1.0;
        eval.curve.push_back(pt);
        i = j;
    }
    // degenerate curves: no incorrect decisions is a perfect ranking
    eval.auc = totalNeg > 0.0 ? (totalPos > 0.0 ? auc : 0.0) : 1.0;
    return eval;
}

struct CausalPair {
    std::string id;
    Vector x;
    Vector y;
    Direction truth = Direction::XcausesY;
    double weight = 1.0;
};

struct CausalRankResult {
    std::vector<CausalDecision> decisions;   // one per pair, input order
    RankedEvaluation evalC;                  // ranked by |scoreC|
    RankedEvaluation evalCs;                 // ranked by |scoreCs|
};

// Scores every pair and builds weighted ROC/PR evaluations for both the
// statistic-difference criterion and the sensitivity criterion.
inline CausalRankResult causal_rank(const std::vector<CausalPair>& pairs,
                                    const CausalConfig& cfg, const Regressor& reg = {}) {
    CausalRankResult result;
    std::vector<ScoredDecision> decC, decCs;
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        CausalConfig pairCfg = cfg;
        pairCfg.seed = substream_seed(cfg.seed, p);
        const CausalDecision dec = causal_score(pairs[p].x, pairs[p].y, pairCfg, reg);
        decC.push_back({pairs[p].id, std::abs(dec.scoreC),
                        (dec.scoreC < 0.0 ? Direction::XcausesY : Direction::YcausesX) ==
                            pairs[p].truth,
                        pairs[p].weight});
        decCs.push_back({pairs[p].id, std::abs(dec.scoreCs),
                         (dec.scoreCs > 0.0 ? Direction::XcausesY : Direction::YcausesX) ==
                             pairs[p].truth,
                         pairs[p].weight});
        result.decisions.push_back(dec);
    }
    result.evalC = weighted_ranked_evaluation(std::move(decC));
    result.evalCs = weighted_ranked_evaluation(std::move(decCs));
    return result;
}

}  // namespace kdep
