#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "couplewelfare/cli.hpp"
#include "couplewelfare/error.hpp"
#include "couplewelfare/hsv.hpp"
#include "couplewelfare/schedule_io.hpp"
#include "couplewelfare/tax_engine.hpp"
#include "couplewelfare/welfare.hpp"

namespace py = pybind11;
using namespace couplewelfare;

namespace {

Earner earner_of(const std::string& s) {
  if (s == "m") return Earner::m;
  if (s == "f") return Earner::f;
  throw Error(ErrorCode::InvalidArgument, "earner must be 'm' or 'f'");
}

py::dict decomposition_dict(const WelfareDecomposition& d) {
  py::dict out;
  out["intensive_m"] = d.intensive_m;
  out["intensive_f"] = d.intensive_f;
  out["extensive_f"] = d.extensive_f;
  out["cross"] = d.cross_effects;
  out["total_wo_ce"] = d.total_without_cross;
  out["total"] = d.total;
  out["per_couple_gains"] = d.per_couple_gains;
  return out;
}

}  // namespace

PYBIND11_MODULE(_couplewelfare, m) {
  m.doc() = "Bindings for the couplewelfare C++ core";

  static py::exception<Error> error(m, "CoupleWelfareError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, (std::string(error_code_name(e.code())) + ": " + e.what()).c_str());
    }
  });

  py::class_<TaxSchedule>(m, "TaxSchedule")
      .def_readonly("year", &TaxSchedule::year)
      .def_readonly("standard_deduction", &TaxSchedule::standard_deduction)
      .def_readonly("personal_exemption", &TaxSchedule::personal_exemption)
      .def_readonly("fica_rate", &TaxSchedule::fica_rate)
      .def_readonly("state_flat_rate", &TaxSchedule::state_flat_rate)
      .def("top_rate", &TaxSchedule::top_rate);

  m.def("load_schedule", &load_schedule, py::arg("path"));
  m.def("flat_schedule", &flat_schedule, py::arg("rate"), py::arg("year") = 0);
  m.def(
      "total_tax",
      [](double ym, double yf, int kids, const TaxSchedule& s) {
        return total_tax({ym, yf, kids}, s).total;
      },
      py::arg("earnings_m"), py::arg("earnings_f"), py::arg("n_children"), py::arg("schedule"));
  m.def(
      "marginal_rate",
      [](double ym, double yf, int kids, const TaxSchedule& s, const std::string& who) {
        return marginal_rate({ym, yf, kids}, s, earner_of(who));
      },
      py::arg("earnings_m"), py::arg("earnings_f"), py::arg("n_children"), py::arg("schedule"),
      py::arg("earner"));
  m.def(
      "participation_rate",
      [](double ym, int kids, double potential_f, const TaxSchedule& s) {
        return participation_rate({ym, 0.0, kids}, potential_f, s);
      },
      py::arg("earnings_m"), py::arg("n_children"), py::arg("potential_f"), py::arg("schedule"));

  m.def(
      "marginal_excess_burden",
      [](const std::vector<double>& y_m, const std::vector<double>& y_f,
         const std::vector<double>& F, const std::vector<double>& weight,
         const std::vector<std::array<double, 6>>& rates, std::array<double, 4> eps,
         std::vector<double> eta) {
        const std::size_t n = y_m.size();
        if (y_f.size() != n || F.size() != n || weight.size() != n || rates.size() != n) {
          throw Error(ErrorCode::InvalidArgument, "input lengths differ");
        }
        std::vector<ImputedCouple> pop(n);
        std::vector<RateBundle> bundles(n);
        for (std::size_t i = 0; i < n; ++i) {
          pop[i].base.id = static_cast<std::int64_t>(i + 1);
          pop[i].base.hours_m = 1.0;
          pop[i].base.wage_m = y_m[i];
          pop[i].base.weight = weight[i];
          pop[i].potential_earnings_f = y_f[i];
          pop[i].participation_prob = F[i];
          const auto& r = rates[i];
          bundles[i] = {r[0], r[1], r[2], r[3], r[4], r[5]};
        }
        ElasticityProfile el{eps[0], eps[1], eps[2], eps[3], std::move(eta)};
        el.validate();
        return decomposition_dict(marginal_excess_burden(pop, bundles, el));
      },
      py::arg("y_m"), py::arg("y_f"), py::arg("F"), py::arg("weight"), py::arg("rates"),
      py::arg("eps"), py::arg("eta"),
      "rates rows are (tau_m, tau_f, a, d_tau_m, d_tau_f, d_a); eps is "
      "(eps_m, eps_f, eps_mf, eps_fm).");

  m.def("linearization_bias", &linearization_bias, py::arg("theta"), py::arg("sigma"));
  m.def(
      "hsv_mdwl",
      [](const std::string& economy_json) {
        const HsvEconomy e = parse_economy(economy_json);
        py::dict out;
        out["lambda"] = equilibrium_scale(e);
        out["mdwl"] = mdwl(e, false);
        out["mdwl_linearized"] = mdwl(e, true);
        return out;
      },
      py::arg("economy_json"));

  m.def(
      "run",
      [](const std::vector<std::string>& args) {
        if (args.empty()) throw Error(ErrorCode::InvalidArgument, "missing command");
        RunConfig cfg;
        cfg.command = args[0];
        auto value = [&](std::size_t& i) {
          if (i + 1 >= args.size()) {
            throw Error(ErrorCode::InvalidArgument, args[i] + " needs a value");
          }
          return args[++i];
        };
        for (std::size_t i = 1; i < args.size(); ++i) {
          const std::string& a = args[i];
          if (a == "--schedule-dir") cfg.schedule_dir = value(i);
          else if (a == "--population") cfg.populations.push_back(value(i));
          else if (a == "--scenario") cfg.scenario = value(i);
          else if (a == "--elasticities") cfg.elasticities = value(i);
          else if (a == "--out-dir") cfg.out_dir = value(i);
          else if (a == "--seed") cfg.seed = std::stoull(value(i));
          else if (a == "--threads") cfg.threads = static_cast<unsigned>(std::stoul(value(i)));
          else if (a == "--full-precision") cfg.full_precision = true;
          else if (a == "--economy") cfg.economy = value(i);
          else if (a == "--sigma") cfg.sigma = std::stod(value(i));
          else if (a == "--theta") cfg.theta = std::stod(value(i));
          else if (a == "--g") cfg.g = std::stod(value(i));
          else if (a == "--regime") cfg.regime = value(i);
          else if (a == "--pop-config") cfg.pop_config = value(i);
          else if (a == "--size") cfg.size = std::stoull(value(i));
          else if (a == "--no-variance-correction") cfg.variance_correction = false;
          else throw Error(ErrorCode::InvalidArgument, "unknown option " + a);
        }
        std::ostringstream err;
        const int code = couplewelfare::run(cfg, err);
        return py::make_tuple(code, err.str());
      },
      py::arg("args"),
      "Runs one CLI command; returns (exit_code, diagnostics).");
}
