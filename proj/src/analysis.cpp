#include "fenc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fenc/encoder.hpp"
#include "fenc/kernels.hpp"
#include "fenc/prng.hpp"

namespace fenc::analysis {

void symmetric_eigen(const Matrix& a, std::vector<double>& values, Matrix& vectors) {
    require(a.rows() == a.cols(), "symmetric_eigen: square matrix required");
    const std::size_t n = a.rows();
    Matrix work = a;
    Matrix v = Matrix::identity(n);

    const int max_sweeps = 100;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) off += work(i, j) * work(i, j);
        }
        if (off < 1e-24) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::fabs(work(p, q)) < 1e-18) continue;
                const double theta = (work(q, q) - work(p, p)) / (2.0 * work(p, q));
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t r = 0; r < n; ++r) {
                    const double wrp = work(r, p), wrq = work(r, q);
                    work(r, p) = c * wrp - s * wrq;
                    work(r, q) = s * wrp + c * wrq;
                }
                for (std::size_t r = 0; r < n; ++r) {
                    const double wpr = work(p, r), wqr = work(q, r);
                    work(p, r) = c * wpr - s * wqr;
                    work(q, r) = s * wpr + c * wqr;
                    const double vpr = v(p, r), vqr = v(q, r);
                    v(p, r) = c * vpr - s * vqr;
                    v(q, r) = s * vpr + c * vqr;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::vector<double> diag(n);
    for (std::size_t i = 0; i < n; ++i) diag[i] = work(i, i);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return diag[i] > diag[j]; });

    values.resize(n);
    vectors = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        values[i] = diag[order[i]];
        for (std::size_t j = 0; j < n; ++j) vectors(i, j) = v(order[i], j);
    }
}

Projection2D pca_project(const std::map<std::string, std::vector<double>>& coeffs) {
    require(coeffs.size() >= 3, "pca_project: need at least 3 contexts");
    const std::size_t n = coeffs.size();
    const std::size_t k = coeffs.begin()->second.size();
    require(k >= 2, "pca_project: need k >= 2");

    Matrix x(n, k);
    std::vector<std::string> ids;
    ids.reserve(n);
    std::size_t r = 0;
    for (const auto& [id, alpha] : coeffs) {
        require(alpha.size() == k, "pca_project: inconsistent k");
        for (std::size_t c = 0; c < k; ++c) x(r, c) = alpha[c];
        ids.push_back(id);
        ++r;
    }

    std::vector<double> mean(k, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < k; ++c) mean[c] += x(i, c);
    }
    for (auto& m : mean) m /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < k; ++c) x(i, c) -= mean[c];
    }

    Matrix cov(k, k);
    for (std::size_t i = 0; i < n; ++i) {
        add_outer(cov, std::span<const double>(x.row(i), k),
                  std::span<const double>(x.row(i), k));
    }
    const double denom = n > 1 ? static_cast<double>(n - 1) : 1.0;
    for (auto& vv : cov.flat()) vv /= denom;

    std::vector<double> values;
    Matrix vectors;
    symmetric_eigen(cov, values, vectors);

    Projection2D out;
    out.components = Matrix(2, k);
    for (std::size_t comp = 0; comp < 2; ++comp) {
        // Deterministic sign: flip so the largest-magnitude entry is positive.
        std::size_t arg = 0;
        for (std::size_t c = 1; c < k; ++c) {
            if (std::fabs(vectors(comp, c)) > std::fabs(vectors(comp, arg))) arg = c;
        }
        const double sign = vectors(comp, arg) < 0.0 ? -1.0 : 1.0;
        for (std::size_t c = 0; c < k; ++c) {
            out.components(comp, c) = sign * vectors(comp, c);
        }
        out.explained_variance[comp] = std::max(values[comp], 0.0);
    }

    for (std::size_t i = 0; i < n; ++i) {
        ProjectedPoint p;
        p.context_id = ids[i];
        p.x = kernels::dot(x.row(i), out.components.row(0), k);
        p.y = kernels::dot(x.row(i), out.components.row(1), k);
        out.points.push_back(std::move(p));
    }
    return out;
}

ClusterScore cluster_score(
    const std::map<std::string, std::vector<std::vector<double>>>& families) {
    require(families.size() >= 2, "cluster_score: need >= 2 families");
    for (const auto& [name, pts] : families) {
        require(pts.size() >= 2, "cluster_score: each family needs >= 2 points");
    }

    auto dist = [](const std::vector<double>& a, const std::vector<double>& b) {
        require(a.size() == b.size(), "cluster_score: dim mismatch");
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double d = a[i] - b[i];
            s += d * d;
        }
        return std::sqrt(s);
    };

    double intra = 0.0;
    std::size_t intra_n = 0;
    for (const auto& [name, pts] : families) {
        for (std::size_t i = 0; i < pts.size(); ++i) {
            for (std::size_t j = i + 1; j < pts.size(); ++j) {
                intra += dist(pts[i], pts[j]);
                ++intra_n;
            }
        }
    }

    double inter = 0.0;
    std::size_t inter_n = 0;
    for (auto it = families.begin(); it != families.end(); ++it) {
        for (auto jt = std::next(it); jt != families.end(); ++jt) {
            for (const auto& a : it->second) {
                for (const auto& b : jt->second) {
                    inter += dist(a, b);
                    ++inter_n;
                }
            }
        }
    }

    ClusterScore out;
    out.mean_intra = intra_n ? intra / static_cast<double>(intra_n) : 0.0;
    out.mean_inter = inter_n ? inter / static_cast<double>(inter_n) : 0.0;
    return out;
}

namespace {

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace

SplitSamples split_calib_eval(const ContextDataset& ds, std::size_t calib_n,
                              std::uint64_t seed) {
    require(ds.samples.size() > calib_n,
            "split_calib_eval: insufficient samples for disjoint eval split");
    Prng rng(seed ^ fnv1a(ds.context_id));
    std::vector<std::size_t> idx(ds.samples.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    rng.shuffle(idx);

    SplitSamples out;
    for (std::size_t i = 0; i < idx.size(); ++i) {
        (i < calib_n ? out.calib : out.eval).push_back(ds.samples[idx[i]]);
    }
    return out;
}

namespace {

template <typename PredictFn>
EvalReport eval_impl(const worlds::GeneratedData& data, std::size_t calib_n,
                     const PredictFn& make_row) {
    EvalReport report;
    report.calib_samples = calib_n;
    report.protocol =
        "per-context seeded shuffle; first " + std::to_string(calib_n) +
        " samples calibrate, the disjoint remainder evaluates; OOD contexts "
        "never appear in gradient training";

    auto add = [&](const ContextDataset& ds, const std::string& split) {
        const auto splits = split_calib_eval(ds, calib_n, data.config.seed);
        report.rows.push_back(make_row(ds, split, splits));
    };
    for (const auto& ds : data.train) add(ds, "train");
    for (const auto& ds : data.holdout) add(ds, "ood");
    std::sort(report.rows.begin(), report.rows.end(),
              [](const EvalRow& a, const EvalRow& b) {
                  return a.context_id < b.context_id;
              });

    double wsum_train = 0.0, wl1_train = 0.0, wsum_ood = 0.0, wl1_ood = 0.0;
    for (const auto& row : report.rows) {
        const auto w = static_cast<double>(row.n);
        if (row.split == "train") {
            wsum_train += w;
            wl1_train += w * row.mean_l1;
        } else {
            wsum_ood += w;
            wl1_ood += w * row.mean_l1;
        }
    }
    report.aggregate_train = wsum_train > 0.0 ? wl1_train / wsum_train : 0.0;
    report.aggregate_ood = wsum_ood > 0.0 ? wl1_ood / wsum_ood : 0.0;
    return report;
}

}  // namespace

EvalReport eval_contexts(const BasisNetwork& net, const worlds::GeneratedData& data,
                         std::size_t calib_samples_per_context) {
    return eval_impl(
        data, calib_samples_per_context,
        [&](const ContextDataset& ds, const std::string& split,
            const SplitSamples& splits) {
            const auto coeff = calibrate(net, splits.calib);
            EvalRow row;
            row.context_id = ds.context_id;
            row.split = split;
            row.alpha = coeff.values;
            row.n = splits.eval.size();
            std::vector<std::vector<double>> pred, target;
            pred.reserve(splits.eval.size());
            target.reserve(splits.eval.size());
            for (const auto& s : splits.eval) {
                pred.push_back(policy_action(net, coeff.values, s.obs));
                target.push_back(s.act);
            }
            row.mean_l1 = empirical_l1(pred, target);
            return row;
        });
}

EvalReport eval_monolithic(const MonolithicNetwork& net,
                           const worlds::GeneratedData& data,
                           std::size_t calib_samples_per_context) {
    return eval_impl(
        data, calib_samples_per_context,
        [&](const ContextDataset& ds, const std::string& split,
            const SplitSamples& splits) {
            EvalRow row;
            row.context_id = ds.context_id;
            row.split = split;
            row.n = splits.eval.size();
            std::vector<std::vector<double>> pred, target;
            pred.reserve(splits.eval.size());
            target.reserve(splits.eval.size());
            for (const auto& s : splits.eval) {
                pred.push_back(net.forward(s.obs));
                target.push_back(s.act);
            }
            row.mean_l1 = empirical_l1(pred, target);
            return row;
        });
}

}  // namespace fenc::analysis
