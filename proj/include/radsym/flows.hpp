#pragma once

#include "radsym/model.hpp"
#include "radsym/solutions.hpp"
#include "radsym/symmetry.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace radsym {

struct FlowPoint {
    double z = 1.0;
    double t = 1.0;
    double u = 1.0;
};

enum class FlowVariant { Printed, Corrected };
std::string to_string(FlowVariant variant);

/// Model plus the constants the closed forms need.
struct FlowContext {
    CoefficientModel model;
    std::optional<Compatibility> y3;
    /// Y4 constant M: the admitted value when Y4 is admitted, else B of Y3, else 0.
    Rational M;
    /// C/K when the ratio is constant, else 0.
    double beta = 0.0;
};

FlowContext make_flow_context(const CoefficientModel& model, std::optional<Rational> M = std::nullopt);

/// Closed-form group element. zbar and tbar are expressions in z, t, lam;
/// jbar gives J(ubar) in terms of z, t, v = J(u) and lam. An absent jbar
/// means ubar = u. An absent zbar means z is mapped numerically (G4_nu2).
struct ClosedFlow {
    std::string label;
    FlowVariant variant = FlowVariant::Corrected;
    std::optional<Expr> zbar;
    Expr tbar;
    std::optional<Expr> jbar;
    std::string text;
};

struct FlowLabel {
    std::string label;
    std::string generator;
    /// True when a printed form differs from the corrected one.
    bool has_printed_variant = false;
    std::string summary;
};

/// G1, G2, G3, G4, G4_nu1, G4_nu2, G4adm, L1..L4, Lt1..Lt6.
const std::vector<FlowLabel>& flow_labels();

/// Closed form of a label for the context. Throws CatalogError for unknown
/// labels or contexts the label does not apply to.
ClosedFlow closed_flow(const std::string& label, const FlowContext& ctx, FlowVariant variant = FlowVariant::Corrected);

/// Generator whose flow the label describes.
Generator flow_generator(const std::string& label, const FlowContext& ctx);

/// Evaluates the closed form. Throws ValidityError, carrying the admissible
/// lambda window around 0 for this point, when the image is undefined.
FlowPoint flow_closed(const std::string& label, const FlowContext& ctx, const FlowPoint& p, double lam,
                      FlowVariant variant = FlowVariant::Corrected);

/// Admissible lambda interval around 0 for the closed form at p, found by
/// bisection and capped at [-limit, limit].
std::pair<double, double> validity_window(const std::string& label, const FlowContext& ctx, const FlowPoint& p,
                                          FlowVariant variant = FlowVariant::Corrected, double limit = 10.0);

struct FlowOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
};

/// Integrates dz/dlam = xi, dt/dlam = tau, du/dlam = eta with adaptive
/// Dormand-Prince steps. Throws DomainExitError with the exit lambda when the
/// trajectory leaves z > 0 or the model's u-domain.
FlowPoint flow_numeric(const Generator& g, const CoefficientModel& model, const FlowPoint& p, double lam,
                       const FlowOptions& options = {});

struct FlowComparison {
    std::string label;
    FlowVariant variant = FlowVariant::Corrected;
    int tested = 0;
    int skipped = 0;
    double max_discrepancy = 0.0;
    double tolerance = 1e-7;
    bool agree = false;
    FlowPoint worst_point;
    double worst_lambda = 0.0;
};

/// Closed form against flow_numeric on `pairs` seeded (point, lambda) pairs.
/// Agreement means |closed - numeric| <= tolerance * max(1, |numeric|) in
/// every coordinate.
FlowComparison compare_flow(const std::string& label, const FlowContext& ctx, FlowVariant variant, std::uint64_t seed = 17,
                            int pairs = 20);

struct AxiomReport {
    double additivity_error = 0.0;
    double inverse_error = 0.0;
    double tolerance = 1e-8;
    bool pass = false;
};

/// flow(lam2) o flow(lam1) = flow(lam1 + lam2) and flow(-lam) o flow(lam) = id
/// for the numeric flow of g at every point.
AxiomReport check_group_axioms(const Generator& g, const CoefficientModel& model, const std::vector<FlowPoint>& points,
                               double lam1, double lam2);

/// The same axioms for a closed form.
AxiomReport check_group_axioms(const std::string& label, const FlowContext& ctx, const std::vector<FlowPoint>& points,
                               double lam1, double lam2, FlowVariant variant = FlowVariant::Corrected);

/// Image of a solution under the group element: u'(z, t) is the u-part of
/// flow(lam) applied to the preimage point flow(-lam)(z, t). Keeps a closed
/// form when both the flow and the solution have one.
InvariantSolution map_solution(const std::string& label, const FlowContext& ctx, double lam, const InvariantSolution& s,
                               FlowVariant variant = FlowVariant::Corrected);

/// Model used when a flow is requested without one: power law k0 = 1, m = 1,
/// c0 = 1 with n = 3 for G labels and n = 1 for L labels. Default nu: 2 for
/// Lt and G4_nu2, 1 for G4_nu1, 3 for G4 and G4adm, else 1.
CoefficientModel default_flow_model(const std::string& label, std::optional<Rational> nu = std::nullopt);

}  // namespace radsym
