#include "twinbeam/chain.hpp"

#include <cmath>
#include <string>

#include "twinbeam/analytic.hpp"

namespace twinbeam {

namespace {

using Eigen::Matrix2d;
using Eigen::Vector2d;

struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double v)
    {
        const double y = v - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

Matrix2d mat_power(Matrix2d a, std::int64_t n)
{
    Matrix2d r = Matrix2d::Identity();
    while (n > 0) {
        if (n & 1)
            r = r * a;
        n >>= 1;
        if (n > 0)
            a = a * a;
    }
    return r;
}

}  // namespace

double ChainConfig::stage_squeeze() const
{
    return medium.squeeze / static_cast<double>(stages);
}

double ChainConfig::stage_ta() const
{
    return std::pow(medium.ta, 1.0 / (2.0 * static_cast<double>(stages)));
}

double ChainConfig::stage_tb() const
{
    return std::pow(medium.tb, 1.0 / (2.0 * static_cast<double>(stages)));
}

void ChainConfig::validate() const
{
    medium.validate();
    if (stages < 1)
        throw DomainError("chain needs at least one stage");
    if (stages > max_stages)
        throw ResourceError("stage count " + std::to_string(stages) +
                            " exceeds the configured maximum " + std::to_string(max_stages));
}

double CoefficientSet::alpha_commutator() const
{
    KahanSum s;
    for (std::size_t i = 0; i < alpha.size(); ++i)
        s.add((i % 2 == 0 ? 1.0 : -1.0) * alpha[i] * alpha[i]);
    return s.sum;
}

double CoefficientSet::beta_commutator() const
{
    KahanSum s;
    for (std::size_t i = 0; i < beta.size(); ++i)
        s.add((i % 2 == 0 ? 1.0 : -1.0) * beta[i] * beta[i]);
    return s.sum;
}

Matrix2d stage_matrix(const ChainConfig& cfg)
{
    cfg.validate();
    const double s = cfg.stage_squeeze();
    const double ta = cfg.stage_ta();
    const double tb = cfg.stage_tb();
    Matrix2d a;
    a << ta * std::cosh(s), ta * std::sinh(s),
         tb * std::sinh(s), tb * std::cosh(s);
    return a;
}

CoefficientSet chain_coefficients(const ChainConfig& cfg)
{
    cfg.validate();
    const Matrix2d a = stage_matrix(cfg);
    const std::int64_t n = cfg.stages;
    const double ka = std::sqrt(1.0 - cfg.stage_ta() * cfg.stage_ta());
    const double kb = std::sqrt(1.0 - cfg.stage_tb() * cfg.stage_tb());

    CoefficientSet set;
    set.alpha.resize(static_cast<std::size_t>(2 * n + 2));
    set.beta.resize(static_cast<std::size_t>(2 * n + 2));

    // Stage i couples through A^(N-i); run i = N..1 so the running product
    // grows one factor per step.
    Matrix2d prod = Matrix2d::Identity();
    for (std::int64_t i = n; i >= 1; --i) {
        const std::size_t ix = static_cast<std::size_t>(2 * i);
        set.alpha[ix] = prod(0, 0) * ka;
        set.alpha[ix + 1] = prod(0, 1) * kb;
        set.beta[ix] = prod(1, 0) * ka;
        set.beta[ix + 1] = prod(1, 1) * kb;
        prod = a * prod;
    }
    set.alpha[0] = prod(0, 0);
    set.alpha[1] = prod(0, 1);
    set.beta[0] = prod(1, 0);
    set.beta[1] = prod(1, 1);
    return set;
}

NoiseResult nf_discrete(const ChainConfig& cfg, const DetectionParams& det)
{
    cfg.validate();
    det.validate();

    const Matrix2d a = stage_matrix(cfg);
    const Matrix2d m = mat_power(a, cfg.stages);
    const double a1 = m(0, 0);
    const double a2 = m(0, 1);
    const double b1 = m(1, 0);
    const double b2 = m(1, 1);

    const double ea = det.eta_a;
    const double eb = det.eta_b;
    const Vector2d u(ea * a1, -eb * b1);

    // Seed-beam terms of the variance sum.
    const double seed_probe = u(0) * a1 + u(1) * b1;
    const double seed_conj = u(0) * a2 + u(1) * b2;
    double variance = seed_probe * seed_probe + seed_conj * seed_conj;

    // Per-stage vacuum contributions, streamed through w_k = (A^T)^k u.
    const double ka = 1.0 - cfg.stage_ta() * cfg.stage_ta();
    const double kb = 1.0 - cfg.stage_tb() * cfg.stage_tb();
    double medium_vacuum = 0.0;
    if (ka != 0.0 || kb != 0.0) {
        const Matrix2d at = a.transpose();
        Vector2d w = u;
        KahanSum sum;
        for (std::int64_t k = 0; k < cfg.stages; ++k) {
            sum.add(ka * w(0) * w(0) + kb * w(1) * w(1));
            w = at * w;
        }
        medium_vacuum = sum.sum;
        variance += medium_vacuum;
    }

    variance += ea * (1.0 - ea) * a1 * a1 + eb * (1.0 - eb) * b1 * b1;

    const double ga = ea * a1 * a1;
    const double gb = eb * b1 * b1;
    NoiseResult r;
    r.gain_probe = ga;
    r.gain_conjugate = gb;
    r.snl_rel = ga + gb;
    r.variance_rel = variance;
    r.nf_linear = variance / r.snl_rel;
    r.nf_db = db_from_linear(r.nf_linear);
    r.breakdown.vacuum_term = medium_vacuum / r.snl_rel;
    r.breakdown.mixing_term = r.nf_linear - 1.0 - r.breakdown.vacuum_term;
    return r;
}

std::vector<ConvergenceRow> convergence_table(const MediumParams& m,
                                              const DetectionParams& det,
                                              const std::vector<std::int64_t>& stage_counts)
{
    if (stage_counts.empty())
        throw DomainError("convergence table needs at least one stage count");
    for (std::size_t i = 1; i < stage_counts.size(); ++i)
        if (stage_counts[i] <= stage_counts[i - 1])
            throw DomainError("stage counts must be strictly ascending");

    const double reference = nf_general(m, det).nf_linear;
    std::vector<ConvergenceRow> rows;
    rows.reserve(stage_counts.size());
    for (const std::int64_t n : stage_counts) {
        ChainConfig cfg;
        cfg.medium = m;
        cfg.stages = n;
        const double nf = nf_discrete(cfg, det).nf_linear;
        rows.push_back({n, nf, std::abs(nf - reference)});
    }
    return rows;
}

}  // namespace twinbeam
