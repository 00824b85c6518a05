// Python module over the cyclix core.  Exact rationals cross the boundary
// as fractions.Fraction and big integers as python ints, both via their
// decimal text form, so no precision is lost.  Library errors map onto
// ValueError (precondition), NotImplementedError (unsupported input) and
// RuntimeError (internal).

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <gmpxx.h>

#include "cyclix/arith.hpp"
#include "cyclix/common.hpp"
#include "cyclix/curve.hpp"
#include "cyclix/density.hpp"
#include "cyclix/galois2.hpp"
#include "cyclix/survey.hpp"

namespace py = pybind11;
using namespace cyclix;

namespace pybind11::detail {

// mpq_class <-> fractions.Fraction through the "n/d" text form
template <>
struct type_caster<mpq_class> {
    PYBIND11_TYPE_CASTER(mpq_class, const_name("Fraction"));

    bool load(handle src, bool) {
        if (PyFloat_Check(src.ptr())) return false;  // no silent rounding
        try {
            value = mpq_class(std::string(str(src)));
            value.canonicalize();
        } catch (const std::invalid_argument&) {
            return false;
        }
        return true;
    }

    static handle cast(const mpq_class& q, return_value_policy, handle) {
        object fraction = module_::import("fractions").attr("Fraction");
        return fraction(q.get_str()).release();
    }
};

// mpz_class -> python int (never passed inward)
template <>
struct type_caster<mpz_class> {
    PYBIND11_TYPE_CASTER(mpz_class, const_name("int"));

    bool load(handle, bool) { return false; }

    static handle cast(const mpz_class& z, return_value_policy, handle) {
        return PyLong_FromString(z.get_str().c_str(), nullptr, 10);
    }
};

}  // namespace pybind11::detail

PYBIND11_MODULE(_cyclix, m) {
    m.doc() =
        "Cyclicity of reduced elliptic curves over prime fields: group "
        "structures, 2-torsion field classification, certified density "
        "brackets and prime surveys.";

    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            switch (e.kind) {
                case ErrKind::precondition:
                    PyErr_SetString(PyExc_ValueError, e.what());
                    break;
                case ErrKind::unsupported:
                    PyErr_SetString(PyExc_NotImplementedError, e.what());
                    break;
                default:
                    PyErr_SetString(PyExc_RuntimeError, e.what());
            }
        }
    });

    // arithmetic helpers
    m.def("is_prime", &is_prime, py::arg("n"));
    m.def("factorize", &factorize, py::arg("n"));
    m.def("euler_phi", &euler_phi, py::arg("n"));
    m.def("moebius", &moebius, py::arg("n"));
    m.def("divisors", &divisors, py::arg("n"));
    m.def("h_function", &h_function, py::arg("n"));
    m.def("squarefree_part", &squarefree_part, py::arg("n"));
    m.def("kronecker", &kronecker, py::arg("a"), py::arg("n"));
    m.def("primes_in_range", &primes_in_range, py::arg("lo"), py::arg("hi"));
    m.def("primes_in_ap", &primes_in_ap, py::arg("f"), py::arg("a"),
          py::arg("x"));

    // curve model and point groups
    py::class_<CurveModel>(m, "CurveModel")
        .def(py::init<i64, i64, i64>(), py::arg("A"), py::arg("B"),
             py::arg("C"))
        .def_readwrite("A", &CurveModel::A)
        .def_readwrite("B", &CurveModel::B)
        .def_readwrite("C", &CurveModel::C)
        .def("__eq__",
             [](const CurveModel& l, const CurveModel& r) { return l == r; })
        .def("__repr__", [](const CurveModel& v) {
            return "CurveModel(" + model_id(v) + ")";
        });
    m.def("model_id", &model_id, py::arg("model"));
    m.def("disc_g", &disc_g, py::arg("model"));
    m.def("disc_E", &disc_E, py::arg("model"));
    m.def("good_reduction", &good_reduction, py::arg("model"), py::arg("p"));
    m.def("count_points", &count_points, py::arg("model"), py::arg("p"),
          py::arg("p0") = 10000);

    py::class_<GroupStructure>(m, "GroupStructure")
        .def_readonly("p", &GroupStructure::p)
        .def_readonly("N", &GroupStructure::N)
        .def_readonly("a_p", &GroupStructure::a_p)
        .def_readonly("d1", &GroupStructure::d1)
        .def_readonly("d2", &GroupStructure::d2)
        .def_readonly("is_cyclic", &GroupStructure::is_cyclic)
        .def("__repr__", [](const GroupStructure& g) {
            return "GroupStructure(p=" + std::to_string(g.p) +
                   ", d1=" + std::to_string(g.d1) +
                   ", d2=" + std::to_string(g.d2) + ")";
        });
    m.def("group_structure", &group_structure, py::arg("model"), py::arg("p"),
          py::arg("p0") = 10000);
    m.def("is_cyclic", &is_cyclic, py::arg("model"), py::arg("p"));
    m.def("full_q_torsion", &full_q_torsion, py::arg("model"), py::arg("p"),
          py::arg("q"));

    // 2-torsion field classification and twist classes
    py::enum_<K2Kind>(m, "K2Kind")
        .value("Trivial", K2Kind::Trivial)
        .value("Quadratic", K2Kind::Quadratic)
        .value("CyclicCubic", K2Kind::CyclicCubic)
        .value("S3", K2Kind::S3);

    py::class_<TwoTorsionField>(m, "TwoTorsionField")
        .def_readonly("kind", &TwoTorsionField::kind)
        .def_readonly("disc_g", &TwoTorsionField::disc_g)
        .def_readonly("f2", &TwoTorsionField::f2)
        .def_readonly("D", &TwoTorsionField::D)
        .def_readonly("d2", &TwoTorsionField::d2)
        .def_readonly("roots", &TwoTorsionField::roots)
        .def_readonly("cubic_kernel", &TwoTorsionField::cubic_kernel);
    m.def("classify_k2", &classify_k2, py::arg("model"));
    m.def("k2_degree", &k2_degree, py::arg("k2"));
    m.def("k2_ab_degree", &k2_ab_degree, py::arg("k2"));
    m.def("cubic_conductor", &cubic_conductor, py::arg("model"));
    m.def("gamma_ab2", &gamma_ab2, py::arg("k2"), py::arg("f"), py::arg("a"));
    m.def("find_b", &find_b, py::arg("k2"));

    py::class_<CongruentB>(m, "CongruentB")
        .def_readonly("exceptional", &CongruentB::exceptional)
        .def_readonly("b", &CongruentB::b);
    m.def("find_b_congruent", &find_b_congruent, py::arg("k2"), py::arg("m"),
          py::arg("a"));

    py::enum_<GateVerdict>(m, "GateVerdict")
        .value("FinitelyMany", GateVerdict::FinitelyMany)
        .value("InfinitelyManyUnconditional",
               GateVerdict::InfinitelyManyUnconditional)
        .value("PositiveDensityConditional",
               GateVerdict::PositiveDensityConditional)
        .value("Undetermined", GateVerdict::Undetermined);

    py::class_<GateResult>(m, "GateResult")
        .def_readonly("verdict", &GateResult::verdict)
        .def_readonly("reasons", &GateResult::reasons);
    m.def("cyclicity_gate", &cyclicity_gate, py::arg("model"), py::arg("f"),
          py::arg("a"));

    // density brackets and the CM gate
    py::class_<CurveProfile>(m, "CurveProfile")
        .def_readonly("model", &CurveProfile::model)
        .def_readonly("k2", &CurveProfile::k2)
        .def_readonly("ent_mod", &CurveProfile::ent_mod)
        .def_readonly("j", &CurveProfile::j)
        .def_readonly("cm", &CurveProfile::cm)
        .def_readonly("cm_maximal", &CurveProfile::cm_maximal)
        .def_readonly("cm_D", &CurveProfile::cm_D);
    m.def("make_profile",
          py::overload_cast<const CurveModel&>(&make_profile),
          py::arg("model"));
    m.def("make_profile",
          py::overload_cast<const CurveModel&, i64>(&make_profile),
          py::arg("model"), py::arg("me_override"));
    m.def("gl2_degree", &gl2_degree, py::arg("d"));

    py::enum_<DensityMode>(m, "DensityMode")
        .value("TruncatedSeries", DensityMode::TruncatedSeries)
        .value("LowerBoundFormula", DensityMode::LowerBoundFormula);

    py::class_<DensityEstimate>(m, "DensityEstimate")
        .def_readonly("model_id", &DensityEstimate::model_id)
        .def_readonly("f", &DensityEstimate::f)
        .def_readonly("a", &DensityEstimate::a)
        .def_readonly("Y", &DensityEstimate::Y)
        .def_readonly("value_lo", &DensityEstimate::value_lo)
        .def_readonly("value_hi", &DensityEstimate::value_hi)
        .def_readonly("tail", &DensityEstimate::tail)
        .def_readonly("gamma_trace", &DensityEstimate::gamma_trace)
        .def_readonly("mode", &DensityEstimate::mode);
    m.def("delta_noncm", &delta_noncm, py::arg("profile"), py::arg("f"),
          py::arg("a"), py::arg("Y") = 200);
    m.def("lower_bound_noncm", &lower_bound_noncm, py::arg("profile"),
          py::arg("f"));
    m.def("tail_bound", &tail_bound, py::arg("Y"), py::arg("f"),
          py::arg("M"));
    m.def("gd_count", &gd_count, py::arg("D"), py::arg("f"), py::arg("a"));
    m.def("gd_histogram", &gd_histogram, py::arg("D"), py::arg("f"));
    m.def("gd_bound", &gd_bound, py::arg("D"), py::arg("f"));

    py::enum_<CmGateResult>(m, "CmGateResult")
        .value("PositiveCertified", CmGateResult::PositiveCertified)
        .value("NotImplied", CmGateResult::NotImplied)
        .value("OutOfScope", CmGateResult::OutOfScope);
    m.def("cm_gate", &cm_gate, py::arg("profile"), py::arg("f"),
          py::arg("a"));

    // prime survey
    py::class_<SurveyRow>(m, "SurveyRow")
        .def_readonly("p", &SurveyRow::p)
        .def_readonly("N", &SurveyRow::N)
        .def_readonly("a_p", &SurveyRow::a_p)
        .def_readonly("d1", &SurveyRow::d1)
        .def_readonly("d2", &SurveyRow::d2)
        .def_readonly("cyclic", &SurveyRow::cyclic);

    py::class_<SurveyReport>(m, "SurveyReport")
        .def_readonly("model_id", &SurveyReport::model_id)
        .def_readonly("f", &SurveyReport::f)
        .def_readonly("a", &SurveyReport::a)
        .def_readonly("x", &SurveyReport::x)
        .def_readonly("pi_ap", &SurveyReport::pi_ap)
        .def_readonly("pi_cyclic", &SurveyReport::pi_cyclic)
        .def_readonly("pi_ap_half", &SurveyReport::pi_ap_half)
        .def_readonly("pi_cyclic_half", &SurveyReport::pi_cyclic_half)
        .def_readonly("excluded_bad", &SurveyReport::excluded_bad)
        .def_readonly("excluded_bad_half", &SurveyReport::excluded_bad_half)
        .def_readonly("ratio", &SurveyReport::ratio)
        .def_readonly("li_x", &SurveyReport::li_x)
        .def_readonly("li_half", &SurveyReport::li_half)
        .def_readonly("gate", &SurveyReport::gate)
        .def_readonly("has_density", &SurveyReport::has_density)
        .def_readonly("density", &SurveyReport::density)
        .def_readonly("exceptional", &SurveyReport::exceptional)
        .def_readonly("has_detail", &SurveyReport::has_detail)
        .def_readonly("detail", &SurveyReport::detail)
        .def_readonly("last_block", &SurveyReport::last_block);

    m.def(
        "run_survey",
        [](const CurveModel& model, i64 f, i64 a, i64 x, bool with_density,
           bool with_detail, int workers, i64 block, i64 p0,
           const std::string& checkpoint) {
            SurveyOptions opt;
            opt.with_density = with_density;
            opt.with_detail = with_detail;
            opt.workers = workers;
            opt.block = block;
            opt.p0 = p0;
            opt.checkpoint = checkpoint;
            // long pure-C++ run with its own worker threads
            py::gil_scoped_release release;
            return run_survey(model, f, a, x, opt);
        },
        py::arg("model"), py::arg("f"), py::arg("a"), py::arg("x"),
        py::arg("with_density") = false, py::arg("with_detail") = false,
        py::arg("workers") = 0, py::arg("block") = i64(1) << 16,
        py::arg("p0") = 10000, py::arg("checkpoint") = "");

    py::enum_<CompareStatus>(m, "CompareStatus")
        .value("Consistent", CompareStatus::Consistent)
        .value("Drifting", CompareStatus::Drifting)
        .value("Alarm", CompareStatus::Alarm)
        .value("MismatchedQuery", CompareStatus::MismatchedQuery);

    py::class_<CompareDiagnostics>(m, "CompareDiagnostics")
        .def_readonly("status", &CompareDiagnostics::status)
        .def_readonly("ratio", &CompareDiagnostics::ratio)
        .def_readonly("midpoint", &CompareDiagnostics::midpoint)
        .def_readonly("deviation", &CompareDiagnostics::deviation)
        .def_readonly("deviation_half", &CompareDiagnostics::deviation_half)
        .def_readonly("note", &CompareDiagnostics::note);
    m.def("compare", &compare, py::arg("report"), py::arg("estimate"));

    m.def("verify_finiteness", &verify_finiteness, py::arg("model"),
          py::arg("f"), py::arg("a"), py::arg("x"), py::arg("cutoff") = 100);
    m.def("export_csv", &export_csv, py::arg("report"), py::arg("path"));
    m.def("export_json", &export_json, py::arg("report"), py::arg("path"));
    m.def("import_json", &import_json, py::arg("path"));
    m.def("li", &li, py::arg("x"));
}
