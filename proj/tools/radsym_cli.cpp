// Command-line front end: classify, commutators, flow, solve, verify-determining.

#include "CLI11.hpp"
#include "json.hpp"
#include "radsym/errors.hpp"
#include "radsym/flows.hpp"
#include "radsym/model.hpp"
#include "radsym/solutions.hpp"
#include "radsym/symmetry.hpp"
#include "radsym/verify.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace radsym;
using nlohmann::ordered_json;

constexpr int kOk = 0;
constexpr int kRuntimeError = 1;
constexpr int kUsageError = 2;
constexpr int kVerifiedFailure = 3;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

const std::vector<std::string> kModelKeys = {"family", "k0", "m", "c0", "n", "lam", "mu", "a",
                                             "b",      "c",  "d", "K",  "C", "u_min", "u_max", "nu"};

struct ModelFlags {
    std::map<std::string, std::optional<std::string>> values;
    std::optional<std::string> spec_file;
    std::optional<std::string> beta;

    bool has_inline() const {
        for (const auto& [key, value] : values) {
            if (value && key != "nu") return true;
        }
        return beta.has_value();
    }
};

void add_model_options(CLI::App* cmd, ModelFlags& flags) {
    for (const auto& key : kModelKeys) {
        auto& slot = flags.values[key];
        cmd->add_option("--" + key, slot, key == "family" ? "power | exp | linear | custom" : "model parameter " + key);
    }
    cmd->add_option("--spec", flags.spec_file, "model spec file (key = value lines)");
    cmd->add_option("--beta", flags.beta, "constant coefficients K = 1, C = beta");
}

std::vector<std::string> required_keys(const std::string& family) {
    if (family == "power") return {"k0", "m", "c0", "n"};
    if (family == "exp") return {"k0", "lam", "c0", "mu"};
    if (family == "linear") return {"k0", "a", "b", "c0", "c", "d"};
    if (family == "custom") return {"K", "C"};
    throw UsageError("unknown --family '" + family + "' (expected power, exp, linear or custom)");
}

/// Builds the model from exactly one source. `default_nu` is used when --nu
/// is absent; `default_beta` allows omitting every model flag.
CoefficientModel resolve_model(const ModelFlags& flags, std::optional<Rational> default_nu = std::nullopt,
                               std::optional<std::string> default_beta = std::nullopt) {
    const auto& nu_flag = flags.values.at("nu");
    if (flags.spec_file) {
        if (flags.has_inline() || nu_flag) throw UsageError("give either --spec or inline model flags, not both");
        return read_model_file(*flags.spec_file);
    }
    std::map<std::string, std::string> values;
    for (const auto& [key, value] : flags.values) {
        if (value) values[key] = *value;
    }
    if (!nu_flag) {
        if (!default_nu) throw UsageError("--nu is required");
        values["nu"] = to_string(*default_nu);
    }
    auto beta = flags.beta ? flags.beta : (values.count("family") ? std::nullopt : default_beta);
    if (beta) {
        if (values.size() > 1) throw UsageError("--beta cannot be combined with family parameters");
        values = {{"family", "power"}, {"k0", "1"}, {"m", "0"}, {"c0", *beta}, {"n", "0"}, {"nu", values["nu"]}};
    }
    if (!values.count("family")) throw UsageError("a model needs --family, --beta or --spec");
    for (const auto& key : required_keys(values["family"])) {
        if (!values.count(key)) throw UsageError("--family " + values["family"] + " needs --" + key);
    }
    return model_from_values(values);
}

std::string fmt(double x) {
    std::ostringstream os;
    os << std::setprecision(12) << x;
    return os.str();
}

std::string generator_text(const Generator& g) {
    return "xi = " + unparse(g.xi) + ", tau = " + unparse(g.tau) + ", eta = " + unparse(g.eta);
}

ordered_json generator_json(const Generator& g) {
    return {{"label", g.label}, {"xi", unparse(g.xi)}, {"tau", unparse(g.tau)}, {"eta", unparse(g.eta)}};
}

void check_format(const std::string& format, std::initializer_list<const char*> allowed) {
    for (const char* f : allowed) {
        if (format == f) return;
    }
    throw UsageError("unsupported --format '" + format + "'");
}

// classify

int cmd_classify(const CoefficientModel& model, const std::string& format) {
    check_format(format, {"text", "json"});
    Classification cls = classify(model);
    const RatioClass& ratio = cls.ratio;
    std::string ratio_name = ratio.constant ? "ConstantRatio" : "NonConstant";
    if (format == "json") {
        ordered_json j;
        j["model"] = model.describe();
        j["ratio"] = ratio_name;
        if (ratio.constant) j["beta"] = ratio.beta;
        j["decided_by"] = ratio.decided_by;
        j["case"] = to_string(cls.case_tag);
        j["generators"] = ordered_json::array();
        for (const auto& g : cls.generators) j["generators"].push_back(generator_json(g));
        if (cls.y3) j["compatibility"] = {{"A", to_string(cls.y3->A)}, {"B", to_string(cls.y3->B)}};
        if (cls.y4_M) j["M"] = to_string(*cls.y4_M);
        j["notes"] = cls.notes;
        std::cout << j.dump(2) << "\n";
        return kOk;
    }
    std::cout << "model: " << model.describe() << "\n";
    std::cout << "ratio: " << ratio_name;
    if (ratio.constant) std::cout << " beta=" << (ratio.beta_exact ? to_string(*ratio.beta_exact) : fmt(ratio.beta));
    std::cout << " (" << ratio.decided_by << ")\n";
    std::cout << "case: " << to_string(cls.case_tag) << "\n";
    std::cout << "generators:";
    for (const auto& g : cls.generators) std::cout << " " << g.label;
    std::cout << "\n";
    for (const auto& g : cls.generators) std::cout << "  " << g.label << ": " << generator_text(g) << "\n";
    if (cls.y3) std::cout << "compatibility: A=" << to_string(cls.y3->A) << ", B=" << to_string(cls.y3->B) << "\n";
    if (cls.y4_M) std::cout << "Y4: M=" << to_string(*cls.y4_M) << "\n";
    for (const auto& note : cls.notes) std::cout << "note: " << note << "\n";
    return kOk;
}

// commutators

int cmd_commutators(const CoefficientModel& model, const std::string& format, std::uint64_t seed) {
    check_format(format, {"text", "json"});
    const Rational& nu = model.nu();
    std::vector<Generator> basis;
    StructureConstants expected;
    std::string basis_kind;
    const RatioClass& ratio = model.ratio_class();
    if (ratio.constant) {
        Rational beta = ratio.beta_exact ? *ratio.beta_exact : to_rational(ratio.beta);
        basis = constant_ratio_basis(nu, beta);
        expected = nu == 2 ? printed_table_spherical(beta) : printed_table_constant(nu);
        basis_kind = nu == 2 ? "constant ratio, nu = 2" : "constant ratio";
    } else {
        Classification cls = classify(model);
        if (cls.generators.size() == 4) {
            basis = cls.generators;
            basis_kind = "admitted generators";
        } else {
            basis = {make_Y1(), make_Y2(), make_Y3_formal(), make_Y4_formal(nu)};
            basis_kind = "formal basis (Y3, Y4 written through F)";
        }
        expected = printed_table_nonconstant(nu);
    }
    TableOptions opts;
    opts.seed = seed;
    CommutatorTable table = commutator_table(basis, model, opts);
    TableComparison cmp = compare_tables(table, expected, basis, model, seed + 2);
    AlgebraCheck alg = check_algebra(table.c);
    const std::size_t n = basis.size();

    if (format == "json") {
        ordered_json j;
        j["model"] = model.describe();
        j["basis"] = basis_kind;
        j["labels"] = table.labels;
        ordered_json rows = ordered_json::array();
        for (std::size_t i = 0; i < n; ++i) {
            ordered_json row = ordered_json::array();
            for (std::size_t k = 0; k < n; ++k) row.push_back(format_combination(table.c[i][k], table.labels));
            rows.push_back(row);
        }
        j["table"] = rows;
        j["degenerate_basis"] = table.degenerate_basis;
        j["max_remainder"] = table.max_remainder;
        j["antisymmetric"] = alg.antisymmetric;
        j["jacobi"] = alg.jacobi;
        j["matches_printed"] = cmp.match;
        j["mismatches"] = ordered_json::array();
        for (const auto& m : cmp.mismatches) {
            j["mismatches"].push_back({{"row", table.labels[m.i]},
                                       {"column", table.labels[m.j]},
                                       {"computed", m.computed},
                                       {"printed", m.expected}});
        }
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "model: " << model.describe() << "\n";
        std::cout << "basis: " << basis_kind << "\n";
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t k = i + 1; k < n; ++k) {
                std::cout << "[" << table.labels[i] << ", " << table.labels[k]
                          << "] = " << format_combination(table.c[i][k], table.labels) << "\n";
            }
        }
        if (table.degenerate_basis) std::cout << "note: the sampled basis is rank deficient for this model\n";
        std::cout << "antisymmetric: " << (alg.antisymmetric ? "yes" : "no") << ", jacobi: " << (alg.jacobi ? "yes" : "no")
                  << "\n";
        for (const auto& m : cmp.mismatches) {
            std::cout << "MISMATCH [" << table.labels[m.i] << ", " << table.labels[m.j] << "]: computed " << m.computed
                      << ", printed " << m.expected << "\n";
        }
        std::cout << "printed table: " << (cmp.match ? "match" : "mismatch") << "\n";
    }
    return cmp.match ? kOk : kVerifiedFailure;
}

// flow

FlowPoint parse_point(const std::string& text) {
    std::vector<double> v;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            v.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw UsageError("--point expects z,t,u, got '" + text + "'");
        }
    }
    if (v.size() != 3) throw UsageError("--point expects z,t,u, got '" + text + "'");
    return {v[0], v[1], v[2]};
}

ordered_json point_json(const FlowPoint& p) { return {p.z, p.t, p.u}; }

std::string point_text(const FlowPoint& p) { return "(" + fmt(p.z) + ", " + fmt(p.t) + ", " + fmt(p.u) + ")"; }

double discrepancy(const FlowPoint& a, const FlowPoint& b) {
    auto scaled = [](double x, double ref) { return std::fabs(x - ref) / std::max(1.0, std::fabs(ref)); };
    return std::max({scaled(a.z, b.z), scaled(a.t, b.t), scaled(a.u, b.u)});
}

int cmd_flow(const ModelFlags& flags, const std::string& label, const std::string& point, double lam,
             const std::string& variant_name, const std::string& format) {
    check_format(format, {"text", "json"});
    FlowVariant variant;
    if (variant_name == "corrected") {
        variant = FlowVariant::Corrected;
    } else if (variant_name == "printed") {
        variant = FlowVariant::Printed;
    } else {
        throw UsageError("--variant must be corrected or printed");
    }
    FlowPoint p = parse_point(point);
    bool known = false;
    for (const auto& entry : flow_labels()) known = known || entry.label == label;
    if (!known) throw UsageError("unknown --gen '" + label + "'");

    CoefficientModel model = [&] {
        if (flags.spec_file || flags.has_inline()) return resolve_model(flags);
        const auto& nu = flags.values.at("nu");
        return default_flow_model(label, nu ? std::optional<Rational>(parse_rational(*nu)) : std::nullopt);
    }();
    FlowContext ctx = make_flow_context(model);
    FlowPoint closed = flow_closed(label, ctx, p, lam, variant);
    FlowPoint numeric = flow_numeric(flow_generator(label, ctx), model, p, lam);
    double d = discrepancy(closed, numeric);
    const double tol = 1e-7;
    bool agree = d <= tol;

    if (format == "json") {
        ordered_json j;
        j["label"] = label;
        j["variant"] = to_string(variant);
        j["model"] = model.describe();
        j["point"] = point_json(p);
        j["lambda"] = lam;
        j["closed"] = point_json(closed);
        j["numeric"] = point_json(numeric);
        j["discrepancy"] = d;
        j["tolerance"] = tol;
        j["agree"] = agree;
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "flow " << label << " (" << to_string(variant) << ") on " << model.describe() << "\n";
        std::cout << "closed:      " << point_text(closed) << "\n";
        std::cout << "numeric:     " << point_text(numeric) << "\n";
        std::cout << "discrepancy: " << fmt(d) << (agree ? "" : "  DISCREPANCY") << "\n";
    }
    return agree ? kOk : kVerifiedFailure;
}

// solve

std::pair<int, int> parse_grid(const std::string& text) {
    auto x = text.find('x');
    try {
        if (x == std::string::npos) throw std::invalid_argument(text);
        int nz = std::stoi(text.substr(0, x));
        int nt = std::stoi(text.substr(x + 1));
        if (nz < 2 || nt < 2) throw std::invalid_argument(text);
        return {nz, nt};
    } catch (const std::exception&) {
        throw UsageError("--grid expects NZxNT with both at least 2, got '" + text + "'");
    }
}

/// Geometry exponent used by solve when --nu is absent.
Rational default_solve_nu(const std::string& id) {
    if (id == "eq137" || id == "eq142" || id == "eq143") return 2;
    return 1;
}

int cmd_solve(const ModelFlags& flags, const std::string& id, const SolutionParams& params, const std::string& grid_text,
              std::optional<double> tolerance, const std::optional<std::string>& output, const std::string& format) {
    check_format(format, {"text", "json", "csv"});
    auto [nz, nt] = parse_grid(grid_text);
    CoefficientModel model = resolve_model(flags, default_solve_nu(id), std::string("1"));
    InvariantSolution s = build_solution(id, model, params);
    Grid grid = default_grid(s, nz, nt);
    ResidualOptions opts;
    opts.tolerance = tolerance;
    ResidualReport report = residual_pde(s, model, grid, opts);

    if (output) {
        std::ofstream csv(*output + ".csv");
        std::ofstream json(*output + ".json");
        if (!csv || !json) throw Error("cannot write output files with prefix '" + *output + "'");
        write_csv(csv, s, grid);
        json << to_json(report) << "\n";
    }
    if (format == "csv") {
        write_csv(std::cout, s, grid);
    } else if (format == "json") {
        std::cout << to_json(report) << "\n";
    } else {
        std::cout << "solution " << s.id << " (" << s.generator << ", " << to_string(s.form) << ") on " << model.describe()
                  << "\n";
        std::cout << "description: " << s.description << "\n";
        std::cout << "grid: z in [" << fmt(grid.region.z_min) << ", " << fmt(grid.region.z_max) << "], t in ["
                  << fmt(grid.region.t_min) << ", " << fmt(grid.region.t_max) << "], " << nz << "x" << nt << "\n";
        std::cout << "method: " << report.method << "\n";
        std::cout << "max residual: " << fmt(report.max_residual) << " (tolerance " << fmt(report.tolerance) << ")\n";
        if (s.suspect) std::cout << "note: entry is flagged suspect\n";
        for (const auto& note : s.notes) std::cout << "note: " << note << "\n";
        std::cout << (report.pass ? "pass" : "verified-fail") << "\n";
    }
    return report.pass ? kOk : kVerifiedFailure;
}

// verify-determining

int cmd_verify_determining(const CoefficientModel& model, bool bogus, bool printed_term, std::uint64_t seed,
                           const std::string& format) {
    check_format(format, {"text", "json"});
    Classification cls = classify(model);
    std::vector<Generator> gens = cls.generators;
    if (bogus) gens.push_back(make_z_translation());
    DeterminingOptions opts;
    opts.seed = seed;
    opts.printed_constant_z_term = printed_term;

    bool all = true;
    ordered_json j;
    j["model"] = model.describe();
    j["generators"] = ordered_json::array();
    if (format == "text") std::cout << "model: " << model.describe() << "\n";
    for (const auto& g : gens) {
        DeterminingReport r = check_determining(model, g, opts);
        all = all && r.pass;
        ordered_json eqs = ordered_json::array();
        std::string line = g.label + ":";
        for (const auto& e : r.equations) {
            eqs.push_back({{"index", e.index},
                           {"zero", e.check.zero},
                           {"path", to_string(e.check.path)},
                           {"max_abs", e.check.max_abs}});
            line += " (" + std::to_string(e.index) + ") " + (e.check.zero ? "ok" : "FAIL");
            if (!e.check.zero) line += " [" + unparse(e.residual) + "]";
        }
        j["generators"].push_back({{"label", g.label}, {"pass", r.pass}, {"failing_index", r.failing_index}, {"equations", eqs}});
        if (format == "text") std::cout << line << "\n";
    }
    j["pass"] = all;
    if (format == "json") {
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << (all ? "all determining equations hold" : "determining equations FAIL") << "\n";
    }
    return all ? kOk : kVerifiedFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"radsym: symmetry classification and invariant solutions of the radial nonlinear heat equation"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string format = "text";
    std::uint64_t seed = 7;
    app.add_option("--format", format, "text | json (solve also accepts csv)");
    app.add_option("--seed", seed, "seed for sampled checks");

    ModelFlags classify_flags, commutator_flags, flow_flags, solve_flags, determining_flags;

    auto* classify_cmd = app.add_subcommand("classify", "classify a model and list its generators");
    add_model_options(classify_cmd, classify_flags);

    auto* commutator_cmd = app.add_subcommand("commutators", "structure constants against the printed tables");
    add_model_options(commutator_cmd, commutator_flags);

    auto* flow_cmd = app.add_subcommand("flow", "closed-form and numeric group action at a point");
    std::string label, point;
    double lam = 0.0;
    std::string variant = "corrected";
    flow_cmd->add_option("--gen", label, "group label, e.g. G2, L1, Lt5")->required();
    flow_cmd->add_option("--point", point, "z,t,u")->required();
    flow_cmd->add_option("--lambda", lam, "group parameter")->required();
    flow_cmd->add_option("--variant", variant, "corrected | printed");
    add_model_options(flow_cmd, flow_flags);

    auto* solve_cmd = app.add_subcommand("solve", "build a catalog solution and check its residual");
    std::string id, grid = "20x20";
    std::optional<double> tolerance;
    std::optional<std::string> output;
    std::map<std::string, std::optional<double>> constants;
    std::vector<std::string> extra_params;
    solve_cmd->add_option("--id", id, "catalog id, e.g. eq137")->required();
    for (const char* key : {"C0", "C1", "C2", "c1", "c2", "Q", "D"}) {
        solve_cmd->add_option(std::string("--") + key, constants[key], std::string("constant ") + key);
    }
    solve_cmd->add_option("--param", extra_params, "other constants as key=value");
    solve_cmd->add_option("--grid", grid, "NZxNT residual grid");
    solve_cmd->add_option("--tol", tolerance, "residual tolerance override");
    solve_cmd->add_option("--output", output, "write PREFIX.csv and PREFIX.json");
    add_model_options(solve_cmd, solve_flags);

    auto* determining_cmd = app.add_subcommand("verify-determining", "substitute generators into the determining equations");
    bool bogus = false, printed_term = false;
    determining_cmd->add_flag("--bogus", bogus, "also check the z-translation, which must fail");
    determining_cmd->add_flag("--printed-z-term", printed_term, "use the constant-ratio equations with the printed z term");
    add_model_options(determining_cmd, determining_flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsageError;
    }

    try {
        if (*classify_cmd) return cmd_classify(resolve_model(classify_flags), format);
        if (*commutator_cmd) return cmd_commutators(resolve_model(commutator_flags), format, seed);
        if (*flow_cmd) return cmd_flow(flow_flags, label, point, lam, variant, format);
        if (*solve_cmd) {
            SolutionParams params;
            for (const auto& [key, value] : constants) {
                if (value) params[key] = *value;
            }
            for (const auto& kv : extra_params) {
                auto eq = kv.find('=');
                if (eq == std::string::npos) throw UsageError("--param expects key=value, got '" + kv + "'");
                try {
                    params[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
                } catch (const std::exception&) {
                    throw UsageError("--param value is not a number: '" + kv + "'");
                }
            }
            return cmd_solve(solve_flags, id, params, grid, tolerance, output, format);
        }
        if (*determining_cmd) {
            return cmd_verify_determining(resolve_model(determining_flags), bogus, printed_term, seed, format);
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kUsageError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntimeError;
    }
    return kUsageError;
}
