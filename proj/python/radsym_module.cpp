#include "radsym/errors.hpp"
#include "radsym/flows.hpp"
#include "radsym/model.hpp"
#include "radsym/solutions.hpp"
#include "radsym/symmetry.hpp"
#include "radsym/verify.hpp"

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace radsym;

namespace {

// Model parameters arrive as int, float or exact strings such as "3/2".
Rational to_exact(const py::handle& value) {
    if (py::isinstance<py::str>(value)) return parse_rational(value.cast<std::string>());
    if (py::isinstance<py::int_>(value)) return Rational(value.cast<long long>());
    return to_rational(value.cast<double>());
}

py::dict generator_dict(const Generator& g) {
    py::dict d;
    d["label"] = g.label;
    d["xi"] = unparse(g.xi);
    d["tau"] = unparse(g.tau);
    d["eta"] = unparse(g.eta);
    return d;
}

FlowVariant variant_from(const std::string& name) {
    if (name == "corrected") return FlowVariant::Corrected;
    if (name == "printed") return FlowVariant::Printed;
    throw py::value_error("variant must be 'corrected' or 'printed'");
}

py::tuple point_tuple(const FlowPoint& p) { return py::make_tuple(p.z, p.t, p.u); }

FlowPoint point_from(const std::tuple<double, double, double>& p) {
    return {std::get<0>(p), std::get<1>(p), std::get<2>(p)};
}

CoefficientModel flow_model(const std::string& label, const std::optional<CoefficientModel>& model) {
    return model ? *model : default_flow_model(label);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Symmetry classification, group actions and invariant solutions of the radial nonlinear heat equation";

    auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<DomainError>(m, "DomainError", error.ptr());
    py::register_exception<ModelError>(m, "ModelError", error.ptr());
    py::register_exception<ValidityError>(m, "ValidityError", error.ptr());
    py::register_exception<CatalogError>(m, "CatalogError", error.ptr());
    py::register_exception<ConvergenceError>(m, "ConvergenceError", error.ptr());
    py::register_exception<DomainExitError>(m, "DomainExitError", error.ptr());

    py::class_<CoefficientModel>(m, "Model")
        .def_static(
            "power",
            [](py::object k0, py::object mm, py::object c0, py::object n, py::object nu) {
                return CoefficientModel::build(PowerLaw{to_exact(k0), to_exact(mm), to_exact(c0), to_exact(n)}, to_exact(nu));
            },
            py::arg("k0"), py::arg("m"), py::arg("c0"), py::arg("n"), py::arg("nu"))
        .def_static(
            "exponential",
            [](py::object k0, py::object lam, py::object c0, py::object mu, py::object nu) {
                return CoefficientModel::build(Exponential{to_exact(k0), to_exact(lam), to_exact(c0), to_exact(mu)},
                                               to_exact(nu));
            },
            py::arg("k0"), py::arg("lam"), py::arg("c0"), py::arg("mu"), py::arg("nu"))
        .def_static(
            "linear",
            [](py::object k0, py::object a, py::object b, py::object c0, py::object c, py::object d, py::object nu) {
                return CoefficientModel::build(
                    Linear{to_exact(k0), to_exact(a), to_exact(b), to_exact(c0), to_exact(c), to_exact(d)}, to_exact(nu));
            },
            py::arg("k0"), py::arg("a"), py::arg("b"), py::arg("c0"), py::arg("c"), py::arg("d"), py::arg("nu"))
        .def_static("from_spec", &read_model_spec, py::arg("text"), "Model from `key = value` lines.")
        .def_property_readonly("nu", &CoefficientModel::nu_value)
        .def_property_readonly("constant_ratio", [](const CoefficientModel& self) { return self.ratio_class().constant; })
        .def_property_readonly("beta", [](const CoefficientModel& self) -> std::optional<double> {
            if (!self.ratio_class().constant) return std::nullopt;
            return self.ratio_class().beta;
        })
        .def("K", &CoefficientModel::K, py::arg("u"))
        .def("C", &CoefficientModel::C, py::arg("u"))
        .def("J", &CoefficientModel::J, py::arg("u"))
        .def("J_inverse", &CoefficientModel::J_inverse, py::arg("v"))
        .def("E", &CoefficientModel::E, py::arg("u"))
        .def("describe", &CoefficientModel::describe)
        .def("__repr__", [](const CoefficientModel& self) { return "<Model " + self.describe() + ">"; });

    m.def(
        "classify",
        [](const CoefficientModel& model) {
            Classification cls = classify(model);
            py::dict d;
            d["ratio"] = cls.ratio.constant ? "ConstantRatio" : "NonConstant";
            d["case"] = to_string(cls.case_tag);
            py::list gens;
            for (const auto& g : cls.generators) gens.append(generator_dict(g));
            d["generators"] = gens;
            if (cls.ratio.constant) d["beta"] = cls.ratio.beta;
            if (cls.y3) {
                d["A"] = to_string(cls.y3->A);
                d["B"] = to_string(cls.y3->B);
            }
            if (cls.y4_M) d["M"] = to_string(*cls.y4_M);
            d["notes"] = cls.notes;
            return d;
        },
        py::arg("model"), "Ratio class, case tag and admitted generators.");

    m.def(
        "check_determining",
        [](const CoefficientModel& model, std::uint64_t seed) {
            py::dict out;
            for (const auto& g : classify(model).generators) {
                DeterminingOptions opts;
                opts.seed = seed;
                out[py::str(g.label)] = check_determining(model, g, opts).pass;
            }
            DeterminingOptions opts;
            opts.seed = seed;
            out["dz"] = check_determining(model, make_z_translation(), opts).pass;
            return out;
        },
        py::arg("model"), py::arg("seed") = 7,
        "Pass flag per admitted generator, plus the z-translation under the key 'dz'.");

    m.def(
        "commutators",
        [](const CoefficientModel& model) {
            const Rational& nu = model.nu();
            const RatioClass& ratio = model.ratio_class();
            std::vector<Generator> basis;
            StructureConstants expected;
            if (ratio.constant) {
                Rational beta = ratio.beta_exact ? *ratio.beta_exact : to_rational(ratio.beta);
                basis = constant_ratio_basis(nu, beta);
                expected = nu == 2 ? printed_table_spherical(beta) : printed_table_constant(nu);
            } else {
                basis = {make_Y1(), make_Y2(), make_Y3_formal(), make_Y4_formal(nu)};
                expected = printed_table_nonconstant(nu);
            }
            CommutatorTable table = commutator_table(basis, model);
            TableComparison cmp = compare_tables(table, expected, basis, model);
            py::dict brackets;
            for (std::size_t i = 0; i < basis.size(); ++i) {
                for (std::size_t j = 0; j < basis.size(); ++j) {
                    brackets[py::make_tuple(table.labels[i], table.labels[j])] =
                        format_combination(table.c[i][j], table.labels);
                }
            }
            py::list mismatches;
            for (const auto& mm : cmp.mismatches) {
                mismatches.append(py::make_tuple(table.labels[mm.i], table.labels[mm.j], mm.computed, mm.expected));
            }
            py::dict d;
            d["labels"] = table.labels;
            d["brackets"] = brackets;
            d["matches_printed"] = cmp.match;
            d["mismatches"] = mismatches;
            return d;
        },
        py::arg("model"), "Structure constants compared with the printed tables.");

    m.def("flow_labels", [] {
        std::vector<std::string> labels;
        for (const auto& entry : flow_labels()) labels.push_back(entry.label);
        return labels;
    });
    m.def(
        "flow_closed",
        [](const std::string& label, const std::tuple<double, double, double>& point, double lam,
           const std::optional<CoefficientModel>& model, const std::string& variant) {
            auto ctx = make_flow_context(flow_model(label, model));
            return point_tuple(flow_closed(label, ctx, point_from(point), lam, variant_from(variant)));
        },
        py::arg("label"), py::arg("point"), py::arg("lam"), py::arg("model") = py::none(),
        py::arg("variant") = "corrected");
    m.def(
        "flow_numeric",
        [](const std::string& label, const std::tuple<double, double, double>& point, double lam,
           const std::optional<CoefficientModel>& model) {
            auto ctx = make_flow_context(flow_model(label, model));
            return point_tuple(flow_numeric(flow_generator(label, ctx), ctx.model, point_from(point), lam));
        },
        py::arg("label"), py::arg("point"), py::arg("lam"), py::arg("model") = py::none());

    py::class_<InvariantSolution>(m, "Solution")
        .def_readonly("id", &InvariantSolution::id)
        .def_readonly("generator", &InvariantSolution::generator)
        .def_readonly("description", &InvariantSolution::description)
        .def_readonly("suspect", &InvariantSolution::suspect)
        .def_readonly("notes", &InvariantSolution::notes)
        .def_property_readonly("form", [](const InvariantSolution& s) { return to_string(s.form); })
        .def_property_readonly("closed_form",
                               [](const InvariantSolution& s) -> std::optional<std::string> {
                                   if (!s.u_expr) return std::nullopt;
                                   return unparse(*s.u_expr);
                               })
        .def_property_readonly("validity",
                               [](const InvariantSolution& s) {
                                   const Rect& r = s.validity;
                                   return py::make_tuple(r.z_min, r.z_max, r.t_min, r.t_max);
                               })
        .def("__call__", [](const InvariantSolution& s, double z, double t) { return s.u(z, t); }, py::arg("z"),
             py::arg("t"))
        .def("__repr__", [](const InvariantSolution& s) { return "<Solution " + s.id + ": " + s.description + ">"; });

    m.def("catalog", [] {
        std::vector<std::tuple<std::string, std::string, std::string>> out;
        for (const auto& e : solution_catalog()) out.emplace_back(e.id, e.generator, e.summary);
        return out;
    });
    m.def("build_solution", &build_solution, py::arg("id"), py::arg("model"),
          py::arg("params") = SolutionParams{});
    m.def(
        "residual_report",
        [](const InvariantSolution& s, const CoefficientModel& model, int nz, int nt) {
            return to_json(residual_pde(s, model, default_grid(s, nz, nt)));
        },
        py::arg("solution"), py::arg("model"), py::arg("nz") = 20, py::arg("nt") = 20,
        "Residual report as a JSON document.");
    m.def("perturbed", &perturbed, py::arg("solution"), py::arg("eps") = 0.01, py::arg("power") = 1);
    m.def(
        "convergence_study",
        [](const CoefficientModel& model, const InvariantSolution& reference,
           const std::tuple<double, double, double, double>& region, const std::vector<std::pair<int, int>>& refinements) {
            auto [z0, z1, t0, t1] = region;
            ConvergenceStudy study = convergence_study(model, reference, {z0, z1, t0, t1}, refinements);
            py::list rows;
            for (const auto& r : study.rows) rows.append(py::make_tuple(r.nz, r.nt, r.error));
            py::dict d;
            d["rows"] = rows;
            d["observed_order"] = study.observed_order;
            d["monotone"] = study.monotone;
            return d;
        },
        py::arg("model"), py::arg("reference"), py::arg("region"), py::arg("refinements"));
}
