#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "padicqm/dynamics.hpp"
#include "padicqm/states.hpp"

namespace padicqm {

/// Region scanned by the apparatus: a ball p^l a + p^l Z_p with positive l,
/// together with its Monna image M(B) = M(p^l a) + [0, p^{-l}].
struct ScanRegion {
    Ball ball;
    RationalInterval monna_image;

    explicit ScanRegion(const Ball& b);
};

/// Orthogonal decomposition induced by multiplication with 1_B:
/// psi = psi^(B) + psi^(B^c), <psi^(B), psi^(B^c)> = 0.
struct BallProjection {
    SpectralState inside;
    SpectralState outside;
};

/// Spectral-side projection assembled case by case from the wavelet
/// restriction table; equals pointwise multiplication by 1_B on the grid.
BallProjection project_ball(const SpectralState& psi, const Ball& b);

enum class RestrictionCase {
    /// supp psi inside B: the wavelet passes through unchanged.
    Unchanged,
    /// B strictly inside supp psi: the restriction is the constant
    /// p^{-r/2} * (character value on B) times 1_B.
    ConstantOnBall,
    /// Disjoint supports: the restriction vanishes.
    Zero,
};

struct WaveletRestriction {
    RestrictionCase kind;
    /// Value of the restricted constant for ConstantOnBall (0 otherwise).
    Complex constant_value;
};

/// Restriction of psi_rbk to a ball, decided by the ball trichotomy of the
/// support against B.
WaveletRestriction restrict_wavelet(const WaveletIndex& idx, const Ball& b);

using RealFunction = std::function<Complex(double)>;

struct PullbackResult {
    /// psi_p(x) * psi_inf(M(x)) sampled at the midpoints of the coset Monna
    /// intervals at the refinement resolution.
    GridState state;
    /// Midpoint-rule diagnostic: estimated Lipschitz constant of |psi_inf|^2
    /// along the sampled range times p^{-refinement}.
    double quadrature_error_bound;
};

/// Pullback of a real-line function through the Monna map against a p-adic
/// state; refinement must be at least the state resolution.
PullbackResult pullback_real(const RealFunction& psi_inf, const GridState& psi_p, int refinement);

/// P_int(B, t) = (1/A) integral_B |psi_p|^2 |psi_inf(M(x))|^2 dx with
/// A the joint weight over the whole domain; throws when A = 0.
double interaction_probability(const GridState& psi_p, const RealFunction& psi_inf, const Ball& b,
                               int refinement);
double interaction_probability(const SpectralState& psi_p, const RealFunction& psi_inf,
                               const Ball& b, int refinement);

/// Result of scanning a ball: zero-weight outcomes are data, not errors.
struct CollapseOutcome {
    bool zero_weight;
    /// ||1_B psi_p psi_inf(M(.))||^2, the un-normalized weight.
    double weight;
    double interaction_probability;
    /// 1_B(x) psi_p(x) psi_inf(M(x)) on the refinement grid.
    GridState localized;
    /// psi^(B)/||psi^(B)||, absent on zero weight.
    std::optional<SpectralState> post_padic;
};

CollapseOutcome collapse_joint(const SpectralState& psi_p, const RealFunction& psi_inf,
                               const Ball& b, int refinement);
/// ProductState front end (packet or harmonic real factor).
CollapseOutcome collapse_joint(const ProductState& psi, const Ball& b, int refinement);

/// GRW comparison model. sigma is the localization width, lambda the Poisson
/// collapse rate per unit time.
struct GrwParams {
    double sigma;
    double lambda;
};

/// g_r(x) = (2 pi sigma^2)^{-1/4} exp(-(x-r)^2/(4 sigma^2)); multiplication
/// keeps packet states closed under localization.
RealPacketState grw_multiply(const RealPacketState& psi, double r, double sigma);
/// psi_+ = g_r psi_- / P(r), unit norm; throws when P(r) = 0.
RealPacketState grw_localize(const RealPacketState& psi, double r, double sigma);
/// P(r) = sqrt(integral |g_r psi|^2 dx).
double grw_probability(const RealPacketState& psi, double r, double sigma);
/// P^2(r): the sampling density of the localization center
/// (integral P^2(r) dr = 1 for normalized psi; the paper's wording names
/// P(r), which does not integrate to 1 — see the project README).
double grw_density(const RealPacketState& psi, double r, double sigma);

struct GrwEvent {
    double time;
    double r;
    double pre_norm;
    double post_norm;
};

struct GrwTrajectory {
    std::vector<GrwEvent> events;
    RealPacketState final_state;
};

/// Alternates closed-form free evolution with localizations at Poisson(lambda)
/// event times; r is drawn from the density P^2(r) by inverse-CDF sampling on
/// a deterministic grid. Fully reproducible given the seed.
GrwTrajectory grw_trajectory(const RealPacketState& psi0, const GrwParams& params, double horizon,
                             double mass, std::uint64_t seed);

/// Event log CSV rows `t_event,r,pre_norm,post_norm`.
void write_grw_event_log(const std::string& path, const std::vector<GrwEvent>& events);

/// One collapse-report record (structured text output, one record per scan).
struct ScanRecord {
    double time;
    Ball ball;
    double p_int;
    double weight;
    double post_norm;
    bool zero_weight;
};

std::string to_string(const Ball& b);
void write_collapse_report(const std::string& path, const std::vector<ScanRecord>& records);

}  // namespace padicqm
