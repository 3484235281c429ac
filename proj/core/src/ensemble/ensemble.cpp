#include "gridcast/ensemble/ensemble.hpp"

#include <algorithm>
#include <cmath>

#include "gridcast/error.hpp"

namespace gridcast::ensemble {

EnsembleSpec EnsembleSpec::campus_default() { return {{{"A", 0.3}, {"B", 0.4}, {"C", 0.3}}}; }

std::vector<double> EnsembleSpec::weights() const {
  std::vector<double> w;
  for (const auto& m : members) w.push_back(m.weight);
  return w;
}

void EnsembleSpec::validate() const {
  if (members.empty()) throw InvalidArgumentError("ensemble needs at least one member");
  double sum = 0.0;
  for (const auto& m : members) {
    if (!(m.weight >= 0.0) || !std::isfinite(m.weight)) {
      throw InvalidArgumentError("ensemble weight for '" + m.id + "' must be a nonnegative number");
    }
    sum += m.weight;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw InvalidArgumentError("ensemble weights sum to " + std::to_string(sum) + ", not 1");
  }
}

std::vector<double> combine_predictions(std::span<const double> weights,
                                        const std::vector<std::vector<double>>& member_predictions) {
  if (weights.size() != member_predictions.size()) {
    throw InvalidArgumentError("got " + std::to_string(weights.size()) + " weights for " +
                               std::to_string(member_predictions.size()) + " members");
  }
  if (member_predictions.empty()) return {};
  const std::size_t n = member_predictions.front().size();
  for (const auto& p : member_predictions) {
    if (p.size() != n) throw AlignmentError("ensemble members produced different numbers of predictions");
  }
  std::vector<double> out(n, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    double acc = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) acc += weights[k] * member_predictions[k][t];
    out[t] = acc;
  }
  return out;
}

std::vector<data::WindowedDataset> align_to_common_targets(std::vector<data::WindowedDataset> datasets) {
  if (datasets.empty()) return datasets;
  data::MinuteTime first = datasets.front().empty() ? data::MinuteTime{} : datasets.front().target_time(0);
  for (const auto& ds : datasets) {
    if (ds.empty()) throw AlignmentError("an ensemble member has no windows to align");
    first = std::max(first, ds.target_time(0));
  }
  for (auto& ds : datasets) {
    std::size_t skip = 0;
    while (skip < ds.count() && ds.target_time(skip) < first) ++skip;
    ds = ds.slice(skip, ds.count());
  }
  const auto& ref = datasets.front();
  for (std::size_t m = 1; m < datasets.size(); ++m) {
    const auto& ds = datasets[m];
    const std::size_t n = std::min(ds.count(), ref.count());
    for (std::size_t j = 0; j < n; ++j) {
      if (ds.target_time(j) != ref.target_time(j)) {
        throw AlignmentError("member " + std::to_string(m) + " diverges from member 0 at target " +
                             data::format_timestamp(ref.target_time(j)));
      }
    }
    if (ds.count() != ref.count()) {
      const auto& longer = ds.count() > ref.count() ? ds : ref;
      throw AlignmentError("members cover different target ranges: extra targets from " +
                           data::format_timestamp(longer.target_time(n)) + " to " +
                           data::format_timestamp(longer.target_time(longer.count() - 1)));
    }
  }
  return datasets;
}

EnsemblePrediction predict_ensemble(const EnsembleSpec& spec, std::span<const MemberInput> inputs) {
  spec.validate();
  if (inputs.size() != spec.members.size()) {
    throw InvalidArgumentError("ensemble spec has " + std::to_string(spec.members.size()) + " members but " +
                               std::to_string(inputs.size()) + " inputs were given");
  }
  EnsemblePrediction out;
  const auto& ref = inputs.front().windows;
  for (std::size_t j = 0; j < ref.count(); ++j) out.timestamps.push_back(ref.target_time(j));

  for (std::size_t m = 0; m < inputs.size(); ++m) {
    const MemberInput& in = inputs[m];
    if (in.model == nullptr) throw InvalidArgumentError("ensemble member '" + spec.members[m].id + "' has no model");
    const auto& ds = in.windows;
    const std::size_t n = std::min(ds.count(), ref.count());
    std::size_t bad = n;
    for (std::size_t j = 0; j < n && bad == n; ++j)
      if (ds.target_time(j) != ref.target_time(j)) bad = j;
    if (bad != n || ds.count() != ref.count()) {
      const std::size_t from = bad != n ? bad : n;
      const auto& longer = ds.count() >= ref.count() ? ds : ref;
      const std::string range =
          from < longer.count() ? data::format_timestamp(longer.target_time(from)) + " .. " +
                                      data::format_timestamp(longer.target_time(longer.count() - 1))
                                : std::string("end of data");
      throw AlignmentError("member '" + spec.members[m].id + "' is misaligned with '" + spec.members[0].id +
                           "' over targets " + range);
    }
    std::vector<double> pred = model::predict(*in.model, ds.inputs);
    if (in.output_scaler) pred = data::invert_scaler(pred, *in.output_scaler, "Freq");
    out.member_predictions.push_back(std::move(pred));
  }
  out.combined = combine_predictions(spec.weights(), out.member_predictions);
  return out;
}

}  // namespace gridcast::ensemble
