#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcorr/angle.hpp"
#include "qcorr/parallel.hpp"
#include "qcorr/prob.hpp"
#include "qcorr/rng.hpp"
#include "qcorr/spin.hpp"

namespace qcorr::scenarios {

using spinalg::CollapseResult;
using spinalg::cplx;
using spinalg::DensityMatrix;
using spinalg::Matrix;
using spinalg::Outcome;
using spinalg::Vector;
using spinalg::both_outcomes;
using spinalg::sign_of;

enum class Scenario {
    bell_pair,         ///< entangled pair, one measurement per side
    sequential_chain,  ///< one spin measured twice in succession
    product_pair,      ///< two independent spins
    triple_operator,   ///< three-operator trace correlator (exact only)
    triple_chain,      ///< one spin measured three times in succession
    culled_pair,       ///< product state with the axis-sensitive terms removed
    lhv_pair,          ///< hidden-variable pair (record id used by the lhv module)
};

inline int scenario_arity(Scenario s) {
    switch (s) {
        case Scenario::triple_operator:
        case Scenario::triple_chain:
            return 3;
        default:
            return 2;
    }
}

inline std::string scenario_name(Scenario s) {
    switch (s) {
        case Scenario::bell_pair: return "bell_pair";
        case Scenario::sequential_chain: return "sequential_chain";
        case Scenario::product_pair: return "product_pair";
        case Scenario::triple_operator: return "triple_operator";
        case Scenario::triple_chain: return "triple_chain";
        case Scenario::culled_pair: return "culled_pair";
        case Scenario::lhv_pair: return "lhv_pair";
    }
    throw std::invalid_argument("unknown scenario id");
}

enum class Method { exact, sampled };

/// One correlation value together with everything needed to reproduce it.
struct CorrelationRecord {
    Scenario scenario = Scenario::bell_pair;
    std::vector<Angle> angles;
    cplx value{};
    Method method = Method::exact;
    std::optional<std::uint64_t> samples;
    std::optional<std::uint64_t> seed;

    void validate() const {
        if (scenario_arity(scenario) == 2 && std::abs(value) > 1.0 + 1e-9)
            throw std::logic_error("CorrelationRecord: two-point correlation outside [-1,1]");
        if (method == Method::sampled && (!samples || !seed))
            throw std::logic_error("CorrelationRecord: sampled record must carry samples and seed");
    }
};

/// Raw outcome tuples, reproducible from (scenario, angles, seed, count).
struct SampleBatch {
    Scenario scenario = Scenario::bell_pair;
    std::vector<Angle> angles;
    std::uint64_t seed = 0;
    int arity = 2;
    std::vector<std::array<int, 3>> outcomes;  ///< third entry 0 when arity is 2
};

/// Initial one-spin state for the sequential scenarios.
enum class InitialState { maximally_mixed, up_z, up_x, up_y };

inline DensityMatrix<2> make_state(InitialState s) {
    switch (s) {
        case InitialState::maximally_mixed: return DensityMatrix<2>::maximally_mixed();
        case InitialState::up_z: return DensityMatrix<2>::pure(spinalg::up_z());
        case InitialState::up_x:
            return DensityMatrix<2>::pure(spinalg::axis_eigenstates(Angle{std::numbers::pi / 2}).up);
        case InitialState::up_y: return DensityMatrix<2>::pure(spinalg::up_y());
    }
    throw std::invalid_argument("unknown initial state");
}

// ---------------------------------------------------------------------------
// Entangled pair
// ---------------------------------------------------------------------------

/// <psi| sigma_theta x sigma_phi |psi> on the singlet, evaluated by explicit
/// 4x4 algebra (the closed form -cos(theta-phi) is a test oracle, not the
/// implementation).
inline double bell_correlation(Angle theta, Angle phi) {
    const Vector<4> psi = spinalg::singlet();
    const Matrix<4> op = spinalg::tensor(spinalg::pauli_axis(theta), spinalg::pauli_axis(phi));
    return psi.dot(op * psi).real();
}

/// P(B measures b on phi | A measured a on theta) for the singlet, via
/// projective collapse of the A subsystem followed by the Born rule at B.
inline double bell_conditional(Angle theta, Angle phi, Outcome a, Outcome b) {
    const auto rho = DensityMatrix<4>::pure(spinalg::singlet());
    const Matrix<4> project_a =
        spinalg::tensor(spinalg::axis_projector(theta, a), Matrix<2>::identity());
    const CollapseResult<4> after_a = spinalg::collapse(rho, project_a);
    if (after_a.impossible())
        throw std::domain_error("bell_conditional: conditioning outcome has probability 0");
    const Matrix<4> project_b =
        spinalg::tensor(Matrix<2>::identity(), spinalg::axis_projector(phi, b));
    return (project_b * after_a.post_state->matrix()).trace().real();
}

// ---------------------------------------------------------------------------
// Sequential chain
// ---------------------------------------------------------------------------

/// Tr(sigma_phi sigma_theta rho). The real part is cos(phi - theta) for every
/// valid rho; y polarization shows up only as i <sigma_y> sin(phi - theta).
inline cplx sequential_correlation_operator(const DensityMatrix<2>& rho, Angle theta, Angle phi) {
    return (spinalg::pauli_axis(phi) * spinalg::pauli_axis(theta) * rho.matrix()).trace();
}

/// E[s1 s2] for measuring theta then phi with collapse in between: the
/// four-branch sum over outcome pairs. Probability-zero branches contribute 0.
inline double sequential_correlation_chain(const DensityMatrix<2>& rho, Angle theta, Angle phi) {
    double e = 0.0;
    for (Outcome s1 : both_outcomes) {
        const CollapseResult<2> first = spinalg::project_and_collapse(rho, theta, s1);
        if (first.impossible()) continue;
        for (Outcome s2 : both_outcomes) {
            const CollapseResult<2> second =
                spinalg::project_and_collapse(*first.post_state, phi, s2);
            e += sign_of(s1) * sign_of(s2) * first.probability * second.probability;
        }
    }
    return e;
}

/// Conditional P(s2 on phi | s1 on theta) for the sequential chain.
inline double sequential_conditional(const DensityMatrix<2>& rho, Angle theta, Angle phi,
                                     Outcome s1, Outcome s2) {
    const CollapseResult<2> first = spinalg::project_and_collapse(rho, theta, s1);
    if (first.impossible())
        throw std::domain_error("sequential_conditional: first outcome has probability 0");
    return spinalg::project_and_collapse(*first.post_state, phi, s2).probability;
}

struct EquivalenceReport {
    double c_ab = 0.0;  ///< entangled cross correlation
    double c_bb = 0.0;  ///< sequential auto correlation at the same angles
    double max_conditional_diff = 0.0;
    bool matches = false;
};

/// Cross-checks the entangled pair against the sequential chain run on the
/// reduced single-spin state I/2: C_BB must equal -C_AB, and every Bell
/// conditional P(B_{s',phi} | A_{-s,theta}) must equal the sequential
/// P(s' on phi | s on theta). The two sides use independent code paths.
inline EquivalenceReport equivalence_report(Angle theta, Angle phi) {
    EquivalenceReport r;
    r.c_ab = bell_correlation(theta, phi);
    const auto mixed = DensityMatrix<2>::maximally_mixed();
    r.c_bb = sequential_correlation_chain(mixed, theta, phi);
    for (Outcome s : both_outcomes) {
        const Outcome opposite = s == Outcome::plus ? Outcome::minus : Outcome::plus;
        for (Outcome s2 : both_outcomes) {
            const double bell = bell_conditional(theta, phi, opposite, s2);
            const double seq = sequential_conditional(mixed, theta, phi, s, s2);
            r.max_conditional_diff = std::max(r.max_conditional_diff, std::abs(bell - seq));
        }
    }
    const double tol = tolerances().feasibility;
    r.matches = std::abs(r.c_ab + r.c_bb) < tol && r.max_conditional_diff < tol;
    return r;
}

// ---------------------------------------------------------------------------
// Independent product pair
// ---------------------------------------------------------------------------

struct ProductProbabilities {
    double p_eq = 0.0;
    double p_diff = 0.0;
};

/// Two independent spins, each prepared spin-up along its reference axis and
/// measured at theta (respectively phi) away from it.
inline ProductProbabilities product_pair_probabilities(Angle theta, Angle phi) {
    const double ct = std::cos(theta.radians / 2), st = std::sin(theta.radians / 2);
    const double cp = std::cos(phi.radians / 2), sp = std::sin(phi.radians / 2);
    return {ct * ct * cp * cp + st * st * sp * sp, ct * ct * sp * sp + st * st * cp * cp};
}

inline double product_correlation(Angle theta, Angle phi) {
    const ProductProbabilities p = product_pair_probabilities(theta, phi);
    return p.p_eq - p.p_diff;
}

/// Amplitudes of the product state in the measurement eigenbasis
/// {|u_t u_p>, |u_t d_p>, |d_t u_p>, |d_t d_p>}, found by basis change
/// (inner products), not by transcribing a closed-form expansion.
inline std::array<cplx, 4> product_amplitudes(Angle theta, Angle phi) {
    const Vector<4> psi = spinalg::tensor(spinalg::up_z(), spinalg::up_z());
    const auto basis_t = spinalg::axis_eigenstates(theta);
    const auto basis_p = spinalg::axis_eigenstates(phi);
    const Vector<2>* t[2] = {&basis_t.up, &basis_t.down};
    const Vector<2>* p[2] = {&basis_p.up, &basis_p.down};
    std::array<cplx, 4> amps{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) amps[2 * i + j] = spinalg::tensor(*t[i], *p[j]).dot(psi);
    return amps;
}

/// Keep only the (phi - theta)-dependent halves of the product-state
/// coefficient split and renormalize. The survivor is a maximally entangled
/// state whose statistics depend on the angle difference alone.
inline Vector<4> cull_relative_terms(Angle theta, Angle phi) {
    const double half_diff = (phi.radians - theta.radians) / 2.0;
    // Full coefficients split as (difference part, sum part), with
    // d = (phi-theta)/2 and s = (phi+theta)/2:
    //   uu: cos(d) - sin(s)   ud: cos(s) - sin(d)
    //   du: cos(s) + sin(d)   dd: cos(d) + sin(s)
    // Culling keeps only the d-dependent parts.
    const std::array<double, 4> kept = {std::cos(half_diff), -std::sin(half_diff),
                                        std::sin(half_diff), std::cos(half_diff)};
    double norm2 = 0.0;
    for (double k : kept) norm2 += k * k;
    if (norm2 < 1e-300) throw std::domain_error("cull_relative_terms: culled state has zero norm");
    const double inv = 1.0 / std::sqrt(norm2);
    return Vector<4>{kept[0] * inv, kept[1] * inv, kept[2] * inv, kept[3] * inv};
}

/// E[s1 s2] of a two-spin state already written in the measurement basis.
inline double correlation_in_measurement_basis(const Vector<4>& state) {
    double e = 0.0;
    for (int i = 0; i < 4; ++i) {
        const double w = std::norm(state[i]);
        const int s1 = i < 2 ? +1 : -1;
        const int s2 = (i % 2) == 0 ? +1 : -1;
        e += w * s1 * s2;
    }
    return e;
}

// ---------------------------------------------------------------------------
// Triple correlators
// ---------------------------------------------------------------------------

/// Tr(sigma_t3 sigma_t2 sigma_t1 rho).
inline cplx triple_operator_correlator(const DensityMatrix<2>& rho, Angle t1, Angle t2, Angle t3) {
    return (spinalg::pauli_axis(t3) * spinalg::pauli_axis(t2) * spinalg::pauli_axis(t1) *
            rho.matrix())
        .trace();
}

/// E[s1 s2 s3] for three successive projective measurements taken in the
/// given order (indices into {t1, t2, t3}); collapse after every step. The
/// eight outcome paths are enumerated exactly. Order matters.
inline double triple_chain_correlation(const DensityMatrix<2>& rho, Angle t1, Angle t2, Angle t3,
                                       std::array<int, 3> order = {0, 1, 2}) {
    std::array<bool, 3> seen{};
    for (int k : order) {
        if (k < 0 || k > 2 || seen[k]) throw std::invalid_argument("triple_chain: bad order");
        seen[k] = true;
    }
    const std::array<Angle, 3> angles = {t1, t2, t3};
    double e = 0.0;
    for (Outcome sa : both_outcomes) {
        const CollapseResult<2> first = spinalg::project_and_collapse(rho, angles[order[0]], sa);
        if (first.impossible()) continue;
        for (Outcome sb : both_outcomes) {
            const CollapseResult<2> second =
                spinalg::project_and_collapse(*first.post_state, angles[order[1]], sb);
            if (second.impossible()) continue;
            for (Outcome sc : both_outcomes) {
                const CollapseResult<2> third =
                    spinalg::project_and_collapse(*second.post_state, angles[order[2]], sc);
                e += sign_of(sa) * sign_of(sb) * sign_of(sc) * first.probability *
                     second.probability * third.probability;
            }
        }
    }
    return e;
}

// ---------------------------------------------------------------------------
// Exact outcome distributions and sampling
// ---------------------------------------------------------------------------

inline InitialState canonical_state(Scenario s) {
    switch (s) {
        case Scenario::sequential_chain: return InitialState::maximally_mixed;
        case Scenario::triple_chain:
        case Scenario::triple_operator: return InitialState::up_z;
        default: return InitialState::up_z;  // unused by the pair scenarios
    }
}

/// Exact outcome distribution of a samplable scenario, in canonical sign
/// order. The chain scenarios take their initial state from `state`.
inline prob::JointDistribution exact_distribution(Scenario scenario, std::span<const Angle> angles,
                                                  InitialState state) {
    const int arity = scenario_arity(scenario);
    if (static_cast<int>(angles.size()) != arity)
        throw std::invalid_argument("exact_distribution: wrong angle count");
    switch (scenario) {
        case Scenario::bell_pair: {
            const auto rho = DensityMatrix<4>::pure(spinalg::singlet());
            std::vector<double> p(4);
            for (int i = 0; i < 4; ++i) {
                const Outcome s1 = i < 2 ? Outcome::plus : Outcome::minus;
                const Outcome s2 = (i % 2) == 0 ? Outcome::plus : Outcome::minus;
                const Matrix<4> proj = spinalg::tensor(spinalg::axis_projector(angles[0], s1),
                                                       spinalg::axis_projector(angles[1], s2));
                p[i] = std::max(0.0, (proj * rho.matrix()).trace().real());
            }
            return prob::JointDistribution(2, std::move(p));
        }
        case Scenario::product_pair: {
            const auto up = DensityMatrix<2>::pure(spinalg::up_z());
            std::vector<double> p(4);
            for (int i = 0; i < 4; ++i) {
                const Outcome s1 = i < 2 ? Outcome::plus : Outcome::minus;
                const Outcome s2 = (i % 2) == 0 ? Outcome::plus : Outcome::minus;
                p[i] = spinalg::project_and_collapse(up, angles[0], s1).probability *
                       spinalg::project_and_collapse(up, angles[1], s2).probability;
            }
            return prob::JointDistribution(2, std::move(p));
        }
        case Scenario::culled_pair: {
            const Vector<4> culled = cull_relative_terms(angles[0], angles[1]);
            std::vector<double> p(4);
            for (int i = 0; i < 4; ++i) p[i] = std::norm(culled[i]);
            return prob::JointDistribution(2, std::move(p));
        }
        case Scenario::sequential_chain: {
            const auto rho = make_state(state);
            std::vector<double> p(4, 0.0);
            for (int i = 0; i < 4; ++i) {
                const Outcome s1 = i < 2 ? Outcome::plus : Outcome::minus;
                const Outcome s2 = (i % 2) == 0 ? Outcome::plus : Outcome::minus;
                const CollapseResult<2> first =
                    spinalg::project_and_collapse(rho, angles[0], s1);
                if (first.impossible()) continue;
                p[i] = first.probability *
                       spinalg::project_and_collapse(*first.post_state, angles[1], s2).probability;
            }
            return prob::JointDistribution(2, std::move(p));
        }
        case Scenario::triple_chain: {
            const auto rho = make_state(state);
            std::vector<double> p(8, 0.0);
            for (int i = 0; i < 8; ++i) {
                const Outcome s1 = (i & 4) ? Outcome::minus : Outcome::plus;
                const Outcome s2 = (i & 2) ? Outcome::minus : Outcome::plus;
                const Outcome s3 = (i & 1) ? Outcome::minus : Outcome::plus;
                const CollapseResult<2> a = spinalg::project_and_collapse(rho, angles[0], s1);
                if (a.impossible()) continue;
                const CollapseResult<2> b =
                    spinalg::project_and_collapse(*a.post_state, angles[1], s2);
                if (b.impossible()) continue;
                p[i] = a.probability * b.probability *
                       spinalg::project_and_collapse(*b.post_state, angles[2], s3).probability;
            }
            return prob::JointDistribution(3, std::move(p));
        }
        default:
            throw std::invalid_argument("exact_distribution: scenario is not samplable");
    }
}

inline constexpr std::uint64_t sample_chunk = 8192;

/// Draw i.i.d. outcome tuples from the scenario's exact distribution with a
/// deterministic counter-seeded generator. The batch is a pure function of
/// (scenario, angles, seed, count, state) whatever the thread count.
inline SampleBatch sample(Scenario scenario, std::vector<Angle> angles, std::uint64_t count,
                          std::uint64_t seed, InitialState state, unsigned threads = 1) {
    if (count < 1) throw std::invalid_argument("sample: count must be at least 1");
    const prob::JointDistribution dist = exact_distribution(scenario, angles, state);
    const int arity = scenario_arity(scenario);

    std::vector<double> cdf(dist.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < dist.size(); ++i) {
        acc += dist.prob(i);
        cdf[i] = acc;
    }
    cdf.back() = 1.0;

    SampleBatch batch{scenario, std::move(angles), seed, arity, {}};
    batch.outcomes.resize(count);
    const std::uint64_t chunks = (count + sample_chunk - 1) / sample_chunk;
    for_each_chunk(chunks, threads, [&](std::uint64_t c) {
        rng::SplitMix gen(rng::derive_seed(seed, c));
        const std::uint64_t begin = c * sample_chunk;
        const std::uint64_t end = std::min(count, begin + sample_chunk);
        for (std::uint64_t k = begin; k < end; ++k) {
            const double u = gen.next_unit();
            std::size_t idx = 0;
            while (idx + 1 < cdf.size() && u >= cdf[idx]) ++idx;
            std::array<int, 3> signs{0, 0, 0};
            for (int v = 0; v < arity; ++v) signs[v] = dist.sign_at(idx, v);
            batch.outcomes[k] = signs;
        }
    });
    return batch;
}

inline SampleBatch sample(Scenario scenario, std::vector<Angle> angles, std::uint64_t count,
                          std::uint64_t seed) {
    return sample(scenario, std::move(angles), count, seed, canonical_state(scenario));
}

/// Empirical correlation of a batch: the mean outcome product.
inline CorrelationRecord estimate(const SampleBatch& batch) {
    if (batch.outcomes.empty()) throw std::invalid_argument("estimate: empty batch");
    double sum = 0.0;
    for (const auto& row : batch.outcomes) {
        int prod = row[0] * row[1];
        if (batch.arity == 3) prod *= row[2];
        sum += prod;
    }
    CorrelationRecord rec{batch.scenario,
                          batch.angles,
                          cplx{sum / static_cast<double>(batch.outcomes.size())},
                          Method::sampled,
                          batch.outcomes.size(),
                          batch.seed};
    rec.validate();
    return rec;
}

/// Exact correlation value for a scenario, as a record.
inline CorrelationRecord exact_record(Scenario scenario, std::vector<Angle> angles,
                                      InitialState state) {
    const int arity = scenario_arity(scenario);
    if (static_cast<int>(angles.size()) != arity)
        throw std::invalid_argument("exact_record: wrong angle count");
    cplx value;
    switch (scenario) {
        case Scenario::bell_pair: value = bell_correlation(angles[0], angles[1]); break;
        case Scenario::sequential_chain:
            value = sequential_correlation_operator(make_state(state), angles[0], angles[1]);
            break;
        case Scenario::product_pair: value = product_correlation(angles[0], angles[1]); break;
        case Scenario::culled_pair:
            value = correlation_in_measurement_basis(cull_relative_terms(angles[0], angles[1]));
            break;
        case Scenario::triple_operator:
            value = triple_operator_correlator(make_state(state), angles[0], angles[1], angles[2]);
            break;
        case Scenario::triple_chain:
            value = triple_chain_correlation(make_state(state), angles[0], angles[1], angles[2]);
            break;
        default: throw std::invalid_argument("exact_record: unknown scenario id");
    }
    CorrelationRecord rec{scenario, std::move(angles), value, Method::exact, std::nullopt,
                          std::nullopt};
    rec.validate();
    return rec;
}

}  // namespace qcorr::scenarios
