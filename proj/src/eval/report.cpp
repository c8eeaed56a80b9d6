#include "pgnn/eval/report.hpp"

#include <sstream>

#include "pgnn/errors.hpp"
#include "pgnn/eval/metrics.hpp"

#ifndef PGNN_VERSION
#define PGNN_VERSION "0.1.0"
#endif

namespace pgnn::eval {

using nlohmann::json;

std::string library_version() { return PGNN_VERSION; }

namespace {

std::string k_label(std::size_t k) { return "L/" + std::to_string(k); }

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> opt_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

void set_acc(TopKCell& c, std::optional<double> acc) {
  c.acc = acc;
  c.err = acc ? std::optional<double>(1.0 - *acc) : std::nullopt;
}

json cell_json(const TopKCell& c) {
  return json{{"acc", opt(c.acc)},
              {"err", opt(c.err)},
              {"selected", c.selected},
              {"hits", c.hits},
              {"shortfall", c.shortfall}};
}

TopKCell cell_from(const json& j) {
  TopKCell c;
  c.acc = opt_from(j.at("acc"));
  c.err = opt_from(j.at("err"));
  c.selected = j.at("selected").get<std::size_t>();
  c.hits = j.at("hits").get<std::size_t>();
  c.shortfall = j.at("shortfall").get<std::size_t>();
  return c;
}

json table_json(const TopKTable& t) {
  json out = json::object();
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t k = 0; k < 4; ++k)
      out[to_string(kRanges[r])][k_label(kTopKDivisors[k])] = cell_json(t[r][k]);
  return out;
}

TopKTable table_from(const json& j) {
  TopKTable t{};
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t k = 0; k < 4; ++k)
      t[r][k] = cell_from(j.at(to_string(kRanges[r])).at(k_label(kTopKDivisors[k])));
  return t;
}

std::string to_string(Aggregation a) {
  return a == Aggregation::protein_mean ? "protein_mean" : "pair_pooled";
}

Aggregation parse_aggregation(const std::string& s) {
  if (s == "protein_mean") return Aggregation::protein_mean;
  if (s == "pair_pooled") return Aggregation::pair_pooled;
  throw ValidationError("unknown aggregation '" + s + "'");
}

}  // namespace

ProteinMetrics protein_metrics(const std::string& id, const ad::Tensor& contact_map,
                               std::span<const double> phi, std::span<const double> psi,
                               const protein::TargetGeometry& truth) {
  ProteinMetrics m;
  m.id = id;
  m.length = truth.length;
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t k = 0; k < 4; ++k) {
      const TopKResult res = contact_accuracy_topk(contact_map, truth.distance, truth.contact_mask,
                                                   kRanges[r], kTopKDivisors[k]);
      TopKCell& c = m.topk[r][k];
      set_acc(c, res.accuracy);
      c.selected = res.selected.size();
      c.hits = res.hits;
      c.shortfall = res.shortfall;
    }
  m.mae_phi = angle_mae(phi, truth.phi, truth.phi_mask);
  m.mae_psi = angle_mae(psi, truth.psi, truth.psi_mask);
  for (auto v : truth.phi_mask) m.phi_count += v != 0;
  for (auto v : truth.psi_mask) m.psi_count += v != 0;
  m.pair_accuracy = contact_pair_accuracy(contact_map, truth.distance, truth.contact_mask);
  return m;
}

ProteinMetrics protein_metrics(const training::Prediction& p, const protein::TargetGeometry& truth) {
  return protein_metrics(p.id, p.edge.contact_map, p.node.phi, p.node.psi, truth);
}

DatasetMetrics aggregate(const std::vector<ProteinMetrics>& proteins, Aggregation mode) {
  DatasetMetrics d;
  d.proteins = proteins.size();
  auto mean_of = [&](auto getter) -> std::optional<double> {
    double s = 0.0;
    std::size_t n = 0;
    for (const auto& p : proteins)
      if (auto v = getter(p)) {
        s += *v;
        ++n;
      }
    if (n == 0) return std::nullopt;
    return s / static_cast<double>(n);
  };
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t k = 0; k < 4; ++k) {
      TopKCell& c = d.topk[r][k];
      for (const auto& p : proteins) {
        c.selected += p.topk[r][k].selected;
        c.hits += p.topk[r][k].hits;
        c.shortfall += p.topk[r][k].shortfall;
      }
      if (mode == Aggregation::protein_mean) {
        set_acc(c, mean_of([&](const ProteinMetrics& p) { return p.topk[r][k].acc; }));
      } else if (c.selected > 0) {
        set_acc(c, static_cast<double>(c.hits) / static_cast<double>(c.selected));
      }
    }
  if (mode == Aggregation::protein_mean) {
    d.mae_phi = mean_of([](const ProteinMetrics& p) { return p.mae_phi; });
    d.mae_psi = mean_of([](const ProteinMetrics& p) { return p.mae_psi; });
  } else {
    auto pooled = [&](auto mae, auto count) -> std::optional<double> {
      double s = 0.0;
      std::size_t n = 0;
      for (const auto& p : proteins)
        if (auto v = mae(p)) {
          s += *v * static_cast<double>(count(p));
          n += count(p);
        }
      if (n == 0) return std::nullopt;
      return s / static_cast<double>(n);
    };
    d.mae_phi = pooled([](const ProteinMetrics& p) { return p.mae_phi; },
                       [](const ProteinMetrics& p) { return p.phi_count; });
    d.mae_psi = pooled([](const ProteinMetrics& p) { return p.mae_psi; },
                       [](const ProteinMetrics& p) { return p.psi_count; });
  }
  d.pair_accuracy = mean_of([](const ProteinMetrics& p) { return p.pair_accuracy; });
  return d;
}

json to_json(const MetricsReport& r) {
  json proteins = json::array();
  for (const auto& p : r.proteins)
    proteins.push_back(json{{"id", p.id},
                            {"length", p.length},
                            {"topk", table_json(p.topk)},
                            {"mae_phi", opt(p.mae_phi)},
                            {"mae_psi", opt(p.mae_psi)},
                            {"phi_count", p.phi_count},
                            {"psi_count", p.psi_count},
                            {"pair_accuracy", opt(p.pair_accuracy)}});
  json exclusions = json::array();
  for (const auto& e : r.exclusions) exclusions.push_back(json{{"id", e.id}, {"reason", e.reason}});
  return json{{"version", r.version},
              {"split", r.split},
              {"aggregation", to_string(r.aggregation)},
              {"config", r.config},
              {"dataset", {{"proteins", r.dataset.proteins},
                           {"topk", table_json(r.dataset.topk)},
                           {"mae_phi", opt(r.dataset.mae_phi)},
                           {"mae_psi", opt(r.dataset.mae_psi)},
                           {"pair_accuracy", opt(r.dataset.pair_accuracy)}}},
              {"proteins", proteins},
              {"exclusions", exclusions}};
}

MetricsReport report_from_json(const json& j) {
  MetricsReport r;
  try {
    r.version = j.at("version").get<std::string>();
    r.split = j.at("split").get<std::string>();
    r.aggregation = parse_aggregation(j.at("aggregation").get<std::string>());
    r.config = j.at("config");
    const json& d = j.at("dataset");
    r.dataset.proteins = d.at("proteins").get<std::size_t>();
    r.dataset.topk = table_from(d.at("topk"));
    r.dataset.mae_phi = opt_from(d.at("mae_phi"));
    r.dataset.mae_psi = opt_from(d.at("mae_psi"));
    r.dataset.pair_accuracy = opt_from(d.at("pair_accuracy"));
    for (const auto& p : j.at("proteins")) {
      ProteinMetrics m;
      m.id = p.at("id").get<std::string>();
      m.length = p.at("length").get<std::size_t>();
      m.topk = table_from(p.at("topk"));
      m.mae_phi = opt_from(p.at("mae_phi"));
      m.mae_psi = opt_from(p.at("mae_psi"));
      m.phi_count = p.at("phi_count").get<std::size_t>();
      m.psi_count = p.at("psi_count").get<std::size_t>();
      m.pair_accuracy = opt_from(p.at("pair_accuracy"));
      r.proteins.push_back(std::move(m));
    }
    for (const auto& e : j.at("exclusions"))
      r.exclusions.push_back({e.at("id").get<std::string>(), e.at("reason").get<std::string>()});
  } catch (const json::exception& e) {
    throw ValidationError(std::string("metrics report: ") + e.what());
  }
  return r;
}

std::string render_report(const MetricsReport& report) { return to_json(report).dump(2) + "\n"; }

MetricsReport parse_report(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("metrics report: ") + e.what());
  }
  return report_from_json(j);
}

std::string render_protein_table(const MetricsReport& report) {
  std::ostringstream out;
  out << "id\tlength";
  for (auto range : kRanges)
    for (auto k : kTopKDivisors) out << '\t' << to_string(range) << "_L/" << k;
  out << "\tmae_phi\tmae_psi\tpair_accuracy\n";
  auto cell = [&](const std::optional<double>& v) {
    out << '\t';
    if (v) out << *v;
    else out << "NA";
  };
  for (const auto& p : report.proteins) {
    out << p.id << '\t' << p.length;
    for (const auto& row : p.topk)
      for (const auto& c : row) cell(c.acc);
    cell(p.mae_phi);
    cell(p.mae_psi);
    cell(p.pair_accuracy);
    out << '\n';
  }
  return out.str();
}

}  // namespace pgnn::eval
