#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cstar/cli.hpp"
#include "cstar/covering.hpp"
#include "cstar/errors.hpp"
#include "cstar/itinerary.hpp"
#include "cstar/map.hpp"
#include "cstar/modulus.hpp"
#include "cstar/partition.hpp"
#include "cstar/programs.hpp"
#include "cstar/raster.hpp"
#include "cstar/realize.hpp"

namespace py = pybind11;
using namespace cstar;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Escaping sets of transcendental self-maps of the punctured plane";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<HorizonExceeded>(m, "HorizonExceeded", error.ptr());
  py::register_exception<NonFinite>(m, "NonFinite", error.ptr());
  py::register_exception<InvalidParameter>(m, "InvalidParameter", error.ptr());
  py::register_exception<ParseError>(m, "ParseError", error.ptr());
  py::register_exception<ThresholdNotFound>(m, "ThresholdNotFound", error.ptr());
  py::register_exception<NotExpanding>(m, "NotExpanding", error.ptr());
  py::register_exception<ChainViolation>(m, "ChainViolation", error.ptr());
  py::register_exception<InequalityViolation>(m, "InequalityViolation", error.ptr());
  py::register_exception<NoCellSurvives>(m, "NoCellSurvives", error.ptr());
  py::register_exception<Unrealizable>(m, "Unrealizable", error.ptr());
  py::register_exception<OracleInconclusive>(m, "OracleInconclusive", error.ptr());
  py::register_exception<PixelCapExceeded>(m, "PixelCapExceeded", error.ptr());

  m.attr("DEFAULT_DELTA") = kDefaultDelta;
  m.attr("DEFAULT_SEED") = kDefaultSeed;

  py::class_<LogPoint>(m, "LogPoint")
      .def(py::init<>())
      .def(py::init<double, double>(), py::arg("L"), py::arg("theta"))
      .def_readwrite("L", &LogPoint::L)
      .def_readwrite("theta", &LogPoint::theta)
      .def("__eq__", [](const LogPoint& a, const LogPoint& b) { return a == b; })
      .def("__repr__", [](const LogPoint& p) {
        return "LogPoint(L=" + format_double(p.L) + ", theta=" + format_double(p.theta) + ")";
      });

  py::class_<CStarMap>(m, "CStarMap")
      .def(py::init<int, std::vector<Complex>, std::vector<Complex>, double, std::string>(), py::arg("n"),
           py::arg("g"), py::arg("h"), py::arg("rotation") = 0.0, py::arg("label") = "")
      .def_property_readonly("n", &CStarMap::index_n)
      .def_property_readonly("g", &CStarMap::g_coeffs)
      .def_property_readonly("h", &CStarMap::h_coeffs)
      .def_property_readonly("rotation", &CStarMap::rotation_angle)
      .def_property_readonly("horizon", &CStarMap::horizon)
      .def("with_horizon", &CStarMap::with_horizon)
      .def("__call__", [](const CStarMap& f, const LogPoint& z) { return eval(f, z); })
      .def("__eq__", [](const CStarMap& a, const CStarMap& b) { return a == b; })
      .def("__str__", [](const CStarMap& f) { return format_map(f); });
  m.def("parse_map", [](const std::string& s) { return parse_map(s); });
  m.def("format_map", &format_map);
  m.def("arnold", &arnold, py::arg("alpha"), py::arg("beta"));
  m.def("eval", &eval);
  m.def("normalize_angle", &normalize_angle);

  py::class_<ModulusSample>(m, "ModulusSample")
      .def_readonly("log_r", &ModulusSample::log_r)
      .def_readonly("log_M", &ModulusSample::log_M)
      .def_readonly("theta_max", &ModulusSample::theta_max)
      .def_readonly("log_m", &ModulusSample::log_m)
      .def_readonly("theta_min", &ModulusSample::theta_min)
      .def_readonly("n_probes", &ModulusSample::n_probes);
  m.def("sample_modulus", &sample_modulus, py::arg("map"), py::arg("log_r"), py::arg("tol") = kModulusTol);
  m.def(
      "log_mu", [](const CStarMap& f, double L, double eps) { return relaxed_modulus(f, L, eps, Relaxed::mu); },
      py::arg("map"), py::arg("log_r"), py::arg("eps"));
  m.def(
      "log_nu", [](const CStarMap& f, double L, double eps) { return relaxed_modulus(f, L, eps, Relaxed::nu); },
      py::arg("map"), py::arg("log_r"), py::arg("eps"));

  py::class_<Thresholds>(m, "Thresholds")
      .def_readonly("log_R_f", &Thresholds::log_R_f)
      .def_readonly("log_R_plus", &Thresholds::log_R_plus)
      .def_readonly("log_R_minus", &Thresholds::log_R_minus);
  m.def("find_thresholds", [](const CStarMap& f) { return find_thresholds(f, default_threshold_grid(f)); });

  py::class_<PropertyCheck>(m, "PropertyCheck")
      .def_readonly("name", &PropertyCheck::name)
      .def_property_readonly("status", [](const PropertyCheck& c) { return to_string(c.status); })
      .def_readonly("worst_margin", &PropertyCheck::worst_margin)
      .def_readonly("samples", &PropertyCheck::samples);
  py::class_<GrowthReport>(m, "GrowthReport")
      .def_readonly("checks", &GrowthReport::checks)
      .def_readonly("log_R_f", &GrowthReport::log_R_f)
      .def("passed", &GrowthReport::passed);
  m.def("verify_growth_properties", &verify_growth_properties, py::arg("map"), py::arg("radii"), py::arg("ks"),
        py::arg("eps_grid") = std::vector<double>{}, py::arg("tol") = 1e-9);

  py::class_<AnnularPartition>(m, "AnnularPartition")
      .def_readonly("log_R_plus", &AnnularPartition::log_R_plus)
      .def_readonly("log_R_minus", &AnnularPartition::log_R_minus)
      .def_readonly("upper", &AnnularPartition::upper)
      .def_readonly("lower", &AnnularPartition::lower);
  m.def("build_partition", &build_partition, py::arg("map"), py::arg("log_R_plus"), py::arg("log_R_minus"),
        py::arg("depth"), py::arg("tol") = kModulusTol);
  m.def("annulus_index", [](const AnnularPartition& p, double L) {
    const AnnulusIndex a = annulus_index(p, L);
    return py::make_tuple(a.index, a.overflow);
  });

  py::class_<OrbitRecord>(m, "OrbitRecord")
      .def_readonly("samples", &OrbitRecord::samples)
      .def_readonly("annular_indices", &OrbitRecord::annular_indices)
      .def_readonly("horizon_hit", &OrbitRecord::horizon_hit)
      .def_property_readonly("verdict", [](const OrbitRecord& r) { return to_string(r.verdict); })
      .def_property_readonly("essential_symbols",
                             [](const OrbitRecord& r) { return symbols_to_string(r.essential_symbols); })
      .def_property_readonly("checked_depth", &OrbitRecord::checked_depth);
  m.def(
      "classify_orbit",
      [](const CStarMap& f, const LogPoint& z, int budget, double theta_escape,
         const std::optional<AnnularPartition>& p) {
        ClassifyOptions o;
        o.budget = budget;
        o.theta_escape = theta_escape;
        return classify_orbit(f, z, o, p ? &*p : nullptr);
      },
      py::arg("map"), py::arg("z0"), py::arg("budget") = 64, py::arg("theta_escape") = 50.0,
      py::arg("partition") = std::nullopt);
  m.def("forward_orbit", &forward_orbit);
  m.def(
      "fast_escape_test",
      [](const CStarMap& f, const LogPoint& z, const std::string& e, double log_R0, int ell, int depth) {
        const FastEscapeResult r = fast_escape_test(f, z, EssentialItinerary::parse(e), log_R0, ell, depth);
        return py::make_tuple(r.holds_on_prefix, r.checked_depth);
      },
      py::arg("map"), py::arg("z0"), py::arg("e"), py::arg("log_R0"), py::arg("ell"), py::arg("depth"));

  py::class_<CoveringAnnulus>(m, "CoveringAnnulus")
      .def_readonly("index", &CoveringAnnulus::index)
      .def_readonly("core_log_r", &CoveringAnnulus::core_log_r)
      .def_readonly("inner_log_r", &CoveringAnnulus::inner_log_r)
      .def_readonly("outer_log_r", &CoveringAnnulus::outer_log_r)
      .def("contains", &CoveringAnnulus::contains);
  py::class_<CoveringAnnuli>(m, "CoveringAnnuli")
      .def_readonly("eps", &CoveringAnnuli::eps)
      .def_readonly("annuli", &CoveringAnnuli::annuli)
      .def("find", [](const CoveringAnnuli& a, int k) -> std::optional<CoveringAnnulus> {
        const CoveringAnnulus* p = a.find(k);
        return p ? std::optional<CoveringAnnulus>(*p) : std::nullopt;
      });
  m.def("choose_eps", &choose_eps);
  m.def("build_covering_annuli", &build_covering_annuli, py::arg("map"), py::arg("partition"), py::arg("eps"),
        py::arg("depth"), py::arg("tol") = kModulusTol);

  py::class_<CoveringCertificate>(m, "CoveringCertificate")
      .def_readonly("from_index", &CoveringCertificate::from_index)
      .def_readonly("to_index", &CoveringCertificate::to_index)
      .def_property_readonly("length", [](const CoveringCertificate& c) { return c.length_check.value; })
      .def_readonly("straddle_pass", &CoveringCertificate::straddle_pass)
      .def_readonly("doubling_pass", &CoveringCertificate::doubling_pass)
      .def_property_readonly("oracle_min_count",
                             [](const CoveringCertificate& c) -> std::optional<long long> {
                               if (!c.oracle || !c.oracle->pass()) return std::nullopt;
                               return c.oracle->min_preimage_count;
                             })
      .def("passed", &CoveringCertificate::pass);
  m.def("certify_covering", &certify_covering, py::arg("map"), py::arg("source"), py::arg("target"),
        py::arg("delta") = kDefaultDelta, py::arg("oracle_targets") = 0, py::arg("seed") = kDefaultSeed,
        py::arg("tol") = kModulusTol);
  m.def("count_preimages", &count_preimages);

  py::class_<CoverageTable>(m, "CoverageTable")
      .def_readonly("monotone", &CoverageTable::monotone)
      .def("covers", &CoverageTable::covers);
  m.def("coverage_table", &coverage_table, py::arg("map"), py::arg("annuli"), py::arg("delta") = kDefaultDelta,
        py::arg("tol") = kModulusTol);

  py::class_<CoveringSetup>(m, "CoveringSetup")
      .def_readonly("log_R_plus", &CoveringSetup::log_R_plus)
      .def_readonly("log_R_minus", &CoveringSetup::log_R_minus)
      .def_readonly("partition", &CoveringSetup::partition)
      .def_readonly("annuli", &CoveringSetup::annuli);
  m.def(
      "select_covering",
      [](const CStarMap& f, double eps, const std::vector<int>& indices, std::optional<double> plus,
         std::optional<double> minus) {
        const Thresholds th = find_thresholds(f, default_threshold_grid(f));
        return select_covering(f, eps, indices, plus, minus, th.log_R_plus, th.log_R_minus);
      },
      py::arg("map"), py::arg("eps"), py::arg("indices"), py::arg("log_R_plus") = std::nullopt,
      py::arg("log_R_minus") = std::nullopt);

  py::class_<MixedAnnuli>(m, "MixedAnnuli")
      .def_readonly("log_R0", &MixedAnnuli::log_R0)
      .def_readonly("annuli", &MixedAnnuli::annuli)
      .def_readonly("violation", &MixedAnnuli::violation)
      .def_readonly("truncated", &MixedAnnuli::truncated)
      .def("depth_reached", &MixedAnnuli::depth_reached);
  m.def(
      "build_mixed_annuli",
      [](const CStarMap& f, const std::string& e, double eps, double log_R0, int depth) {
        return build_mixed_annuli(f, EssentialItinerary::parse(e), eps, log_R0, depth);
      },
      py::arg("map"), py::arg("e"), py::arg("eps"), py::arg("log_R0"), py::arg("depth"));

  py::class_<AnnularItinerary>(m, "AnnularItinerary")
      .def_readonly("prefix", &AnnularItinerary::prefix)
      .def_readonly("cycle", &AnnularItinerary::cycle)
      .def_readonly("truncated", &AnnularItinerary::truncated)
      .def_property_readonly("kind", [](const AnnularItinerary& a) { return to_string(a.kind); })
      .def("take", &AnnularItinerary::take)
      .def("__str__", &AnnularItinerary::to_string);
  m.def(
      "build_program",
      [](const std::string& text, const CStarMap& f, const CoveringAnnuli& annuli) {
        return build_program(parse_program(text), f, annuli);
      },
      py::arg("text"), py::arg("map"), py::arg("annuli"));
  m.def("validate_program", &validate_program);

  py::class_<RealizeOptions>(m, "RealizeOptions")
      .def(py::init<>())
      .def_readwrite("grid", &RealizeOptions::grid)
      .def_readwrite("margin", &RealizeOptions::margin)
      .def_readwrite("tol", &RealizeOptions::tol)
      .def_readwrite("max_cells", &RealizeOptions::max_cells);
  py::class_<RealizedOrbit>(m, "RealizedOrbit")
      .def_readonly("point", &RealizedOrbit::point)
      .def_readonly("verified_depth", &RealizedOrbit::verified_depth)
      .def_readonly("truncated", &RealizedOrbit::truncated)
      .def_readonly("itinerary", &RealizedOrbit::itinerary)
      .def_property_readonly("orbit", [](const RealizedOrbit& r) { return r.check.orbit; })
      .def_property_readonly("min_band_depth", [](const RealizedOrbit& r) { return r.check.min_depth(); });
  m.def("realize_orbit", &realize_orbit, py::arg("map"), py::arg("annuli"), py::arg("itinerary"),
        py::arg("options") = RealizeOptions{});
  m.def(
      "construct_orbit",
      [](const CStarMap& f, const std::vector<CoveringAnnulus>& annuli, const std::vector<int>& itinerary,
         double delta, int oracle_targets, std::uint64_t seed, const RealizeOptions& o) {
        ConstructResult r = construct_orbit(f, annuli, itinerary, delta, oracle_targets, seed, o);
        return py::make_tuple(r.orbit, r.certificates);
      },
      py::arg("map"), py::arg("annuli"), py::arg("itinerary"), py::arg("delta") = kDefaultDelta,
      py::arg("oracle_targets") = 0, py::arg("seed") = kDefaultSeed, py::arg("options") = RealizeOptions{});

  py::class_<RenderWindow>(m, "RenderWindow")
      .def(py::init<>())
      .def_readwrite("L_min", &RenderWindow::L_min)
      .def_readwrite("L_max", &RenderWindow::L_max)
      .def_readwrite("theta_min", &RenderWindow::theta_min)
      .def_readwrite("theta_max", &RenderWindow::theta_max)
      .def_readwrite("width", &RenderWindow::width)
      .def_readwrite("height", &RenderWindow::height)
      .def_readwrite("budget", &RenderWindow::budget)
      .def_readwrite("palette_id", &RenderWindow::palette_id);
  py::class_<ClassGrid>(m, "ClassGrid")
      .def_readonly("width", &ClassGrid::width)
      .def_readonly("height", &ClassGrid::height)
      .def_readonly("ids", &ClassGrid::ids)
      .def("at", &ClassGrid::at)
      .def("ppm", [](const ClassGrid& g) { return py::bytes(encode_ppm(g)); })
      .def("legend_csv", [](const ClassGrid& g) { return legend_csv(g); });
  m.def(
      "render_classification",
      [](const CStarMap& f, const RenderWindow& w, int prefix_length, int threads) {
        RenderOptions o;
        o.prefix_length = prefix_length;
        o.threads = threads;
        py::gil_scoped_release release;
        return render_classification(f, w, o);
      },
      py::arg("map"), py::arg("window"), py::arg("prefix_length") = 6, py::arg("threads") = 1);
  m.def("point_of", &point_of);
  m.def("pixel_of", &pixel_of);
  m.def("export_modulus_csv", &export_modulus_csv, py::arg("map"), py::arg("log_r"), py::arg("eps"),
        py::arg("tol") = kModulusTol);

  m.def(
      "run_cli", [](const std::vector<std::string>& args) { return cli::run(args); },
      "Runs the command-line tool with argv (argv[0] is the program name); returns the exit code.");
  m.def("sha256_hex", [](const py::bytes& b) { return cli::sha256_hex(std::string(b)); });
}
