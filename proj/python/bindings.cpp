// Python bindings. The boundary takes and returns JSON text and plain
// numbers so the schema stays defined in one place.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "rubric_reward/aggregation.hpp"
#include "rubric_reward/batch.hpp"
#include "rubric_reward/error.hpp"
#include "rubric_reward/execution.hpp"
#include "rubric_reward/transport.hpp"
#include "rubric_reward/verifiers.hpp"

namespace py = pybind11;
namespace rr = rubric_reward;

namespace {

py::object engine_error_type;

[[noreturn]] void raise(const rr::Error& e) {
  py::object err = engine_error_type(std::string(rr::to_string(e.code())), e.message());
  if (e.offset()) err.attr("offset") = *e.offset();
  PyErr_SetObject(engine_error_type.ptr(), err.ptr());
  throw py::error_already_set();
}

template <typename Fn>
auto guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const rr::Error& e) {
    raise(e);
  }
}

/// Runs `fn` with the interpreter lock released. Engine errors are held
/// until the lock is back, since raising touches Python objects.
template <typename Fn>
auto without_gil(Fn&& fn) {
  std::optional<rr::Error> err;
  decltype(fn()) out{};
  {
    py::gil_scoped_release release;
    try {
      out = fn();
    } catch (const rr::Error& e) {
      err = e;
    }
  }
  if (err) raise(*err);
  return out;
}

py::dict breakdown_dict(const rr::RewardBreakdown& b) {
  py::dict d;
  d["final"] = b.final;
  d["advantage"] = b.advantage;
  d["scores"] = b.raw;
  d["remapped"] = b.remapped;
  d["base"] = b.base;
  d["content_mask"] = b.content_mask;
  d["format_mask"] = b.format_mask;
  d["length_exceeded"] = b.length_exceeded;
  return d;
}

double verify_call(const std::string& target, const std::string& predict, double point_scale) {
  return guarded([&] {
    rr::VerifierCall t = rr::parse_call(target);
    rr::VerifierCall p = rr::parse_call(predict);
    rr::check_call_side(t, rr::CallSide::Target);
    rr::check_call_side(p, rr::CallSide::Predict);
    rr::VerifierConfig cfg;
    cfg.point_scale = point_scale;
    return rr::run_verifier(rr::merge_calls(t, p), cfg);
  });
}

/// Engine session with fixed settings. Holds no mutable state, so one
/// instance can serve several host threads at once.
class BoundEngine {
 public:
  BoundEngine(double tau, std::optional<std::int64_t> max_length, bool format_rules,
              double point_scale, bool strict_pairing) {
    config_.tau = tau;
    config_.max_length = max_length;
    config_.format_rules_enabled = format_rules;
    verifier_.point_scale = point_scale;
    mode_ = strict_pairing ? rr::PairingMode::Strict : rr::PairingMode::Lenient;
    guarded([&] {
      if (!(tau > 0.0 && tau <= 1.0)) throw rr::Error(rr::ErrorCode::ArgumentError, "tau must be in (0, 1]");
      if (max_length && *max_length <= 0) {
        throw rr::Error(rr::ErrorCode::ArgumentError, "max_length must be positive");
      }
      if (!(point_scale > 0.0)) throw rr::Error(rr::ErrorCode::ArgumentError, "point_scale must be positive");
      return 0;
    });
  }

  py::list score_group(const std::string& rubric_json, const std::vector<std::string>& scorings,
                       const std::vector<std::int64_t>& lengths,
                       const std::optional<std::vector<std::string>>& responses) const {
    std::vector<rr::RewardBreakdown> out = without_gil([&] {
        if (scorings.size() != lengths.size() || (responses && responses->size() != scorings.size())) {
          throw rr::Error(rr::ErrorCode::ArgumentError, "group lists differ in length");
        }
        rr::Rubric rubric = rr::parse_rubric(rubric_json);
        const auto strictness =
            mode_ == rr::PairingMode::Strict ? rr::CallStrictness::Strict : rr::CallStrictness::Lenient;
        std::vector<rr::ScoredRollout> rollouts;
        for (std::size_t i = 0; i < scorings.size(); ++i) {
          rollouts.push_back({rr::parse_scoring(scorings[i], strictness),
                              responses ? (*responses)[i] : std::string(), lengths[i]});
        }
        return rr::score_group(rubric, rollouts, config_, mode_, verifier_);
    });
    py::list result;
    for (const auto& b : out) result.append(breakdown_dict(b));
    return result;
  }

  double tau() const { return config_.tau; }
  std::optional<std::int64_t> max_length() const { return config_.max_length; }

 private:
  rr::AggregationConfig config_;
  rr::VerifierConfig verifier_;
  rr::PairingMode mode_ = rr::PairingMode::Lenient;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Rubric reward engine";

  engine_error_type = py::reinterpret_borrow<py::object>(
      py::module_::import("rubric_reward._errors").attr("EngineError"));
  m.attr("EngineError") = engine_error_type;

  m.def("verify_call", &verify_call, py::arg("target_call"), py::arg("predict_call"),
        py::arg("point_scale") = 141.42, "Score one rubric-side call against one scoring-side call.");

  py::class_<BoundEngine>(m, "BoundEngine")
      .def(py::init<double, std::optional<std::int64_t>, bool, double, bool>(), py::kw_only(),
           py::arg("tau") = 0.5, py::arg("max_length") = py::none(), py::arg("format_rules") = true,
           py::arg("point_scale") = 141.42, py::arg("strict_pairing") = false)
      .def("score_group", &BoundEngine::score_group, py::arg("rubric_json"), py::arg("scoring_jsons"),
           py::arg("response_lengths"), py::arg("responses") = py::none(),
           "Rewards and advantages for one rollout group.")
      .def_property_readonly("tau", &BoundEngine::tau)
      .def_property_readonly("max_length", &BoundEngine::max_length);

  m.def(
      "group_advantages",
      [](const std::vector<double>& rewards) {
        return guarded([&] { return rr::group_advantages(rewards); });
      },
      py::arg("rewards"));
  m.def(
      "remap_row",
      [](const std::vector<double>& row, double tau) {
        return guarded([&] { return rr::remap_row(row, tau); });
      },
      py::arg("row"), py::arg("tau") = 0.5);

  py::class_<rr::ReplayTransport>(m, "ReplayTransport")
      .def(py::init([](const std::string& path) {
             return guarded([&] { return new rr::ReplayTransport(rr::ReplayTransport::from_file(path)); });
           }),
           py::arg("path"));

  m.def(
      "request_scoring",
      [](const std::string& task_json, const std::string& rubric_json, rr::ReplayTransport& transport,
         int retries) {
        return without_gil([&] {
          nlohmann::json j = nlohmann::json::parse(task_json, nullptr, false);
          if (!j.is_object()) throw rr::Error(rr::ErrorCode::MalformedDocument, "task is not a JSON object");
          rr::ScoringRequestOptions opts;
          opts.retries = retries;
          rr::ScoringResult r =
              rr::request_scoring(rr::task_from_json(j), rr::parse_rubric(rubric_json), transport, opts);
          return r.raw;
        });
      },
      py::arg("task_json"), py::arg("rubric_json"), py::arg("transport"), py::arg("retries") = 2,
      "Ask the transport for a scoring of one response; returns the raw output text.");
}
