// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "tempdir.hpp"

#include "pgnn/autodiff/graph.hpp"
#include "pgnn/autodiff/ops.hpp"
#include "pgnn/edge_path/edge_path.hpp"
#include "pgnn/eval/gradcheck_suite.hpp"
#include "pgnn/eval/metrics.hpp"
#include "pgnn/eval/prediction_io.hpp"
#include "pgnn/eval/report.hpp"
#include "pgnn/featurize/features.hpp"
#include "pgnn/node_path/node_path.hpp"
#include "pgnn/protein/geometry.hpp"
#include "pgnn/protein/manifest.hpp"
#include "pgnn/protein/pdb.hpp"
#include "pgnn/protein/synthetic.hpp"
#include "pgnn/training/checkpoint.hpp"
#include "pgnn/training/losses.hpp"
#include "pgnn/training/trainer.hpp"

using namespace pgnn;
using ad::Tensor;
using Clock = std::chrono::steady_clock;

namespace {

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool passed = false;
  std::string detail;
};

int failures = 0;

void run(int number, const char* title, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.passed) ++failures;
  std::printf("[%s] %d %s (%.1fs): %s\n", o.passed ? "PASS" : "FAIL", number, title, since(t0), o.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::vector<training::Example> examples(const std::vector<protein::ProteinRecord>& recs,
                                        const training::TrainingConfig& c) {
  std::vector<training::Example> out;
  for (const auto& r : recs) out.push_back(training::make_example(r, c, {}));
  return out;
}

// ---------------------------------------------------------------------------

Outcome gradients() {
  const auto t0 = Clock::now();
  const auto r = eval::run_gradcheck_suite(true);
  const double secs = since(t0);
  std::string worst;
  double max_abs = 0.0;
  for (const auto& c : r.cases) {
    if (!c.report.passed) worst += " " + c.name;
    max_abs = std::max(max_abs, c.report.max_abs_error);
  }
  return {r.passed && r.max_rel_error <= 1e-3 && secs < 300.0,
          std::to_string(r.cases.size()) + " cases, max rel error " + fmt("%.3g", r.max_rel_error) +
              ", max abs error " + fmt("%.3g", max_abs) + ", " + fmt("%.1f s", secs) +
              (worst.empty() ? "" : ", failing:" + worst)};
}

Outcome rigid_motion() {
  std::mt19937_64 rng(20);
  std::uniform_real_distribution<double> shift(-100, 100);
  double worst_d = 0.0, worst_a = 0.0;
  for (int p = 0; p < 20; ++p) {
    const auto rec = protein::synthetic_protein("r" + std::to_string(p), 20 + rng() % 41, rng);
    const auto d0 = protein::ca_distance_matrix(rec);
    const auto a0 = protein::backbone_dihedrals(rec);
    for (int t = 0; t < 10; ++t) {
      const auto m = oracle::random_rotation(rng);
      const auto moved = protein::transformed(
          rec, {protein::Vec3{m[0][0], m[0][1], m[0][2]}, protein::Vec3{m[1][0], m[1][1], m[1][2]},
                protein::Vec3{m[2][0], m[2][1], m[2][2]}},
          {shift(rng), shift(rng), shift(rng)});
      worst_d = std::max(worst_d, oracle::max_abs_diff(protein::ca_distance_matrix(moved).distance, d0.distance));
      const auto a1 = protein::backbone_dihedrals(moved);
      for (std::size_t i = 0; i < rec.length(); ++i) {
        if (a1.phi_mask[i] != a0.phi_mask[i] || a1.psi_mask[i] != a0.psi_mask[i]) return {false, "mask changed"};
        if (a0.phi_mask[i]) worst_a = std::max(worst_a, eval::wrapped_difference(a1.phi[i], a0.phi[i]));
        if (a0.psi_mask[i]) worst_a = std::max(worst_a, eval::wrapped_difference(a1.psi[i], a0.psi[i]));
      }
    }
  }
  return {worst_d <= 1e-9 && worst_a <= 1e-7,
          "200 motions, max distance change " + fmt("%.3g A", worst_d) + ", max dihedral change " +
              fmt("%.3g deg", worst_a)};
}

Tensor random_probs(std::size_t n, std::size_t bins, std::mt19937_64& rng) {
  Tensor p = oracle::random_tensor({n * n, bins}, rng, 0.01, 1.0);
  for (std::size_t r = 0; r < n * n; ++r) {
    double s = 0;
    for (std::size_t b = 0; b < bins; ++b) s += p(r, b);
    for (std::size_t b = 0; b < bins; ++b) p(r, b) /= s;
  }
  return p;
}

Outcome oracles() {
  constexpr int kTrials = 100;
  std::mt19937_64 rng(3);
  double e2e = 0, conv = 0, msg = 0, el = 0, nl = 0;
  std::size_t topk_mismatch = 0;
  for (int t = 0; t < kTrials; ++t) {
    {
      const std::size_t cin = 1 + rng() % 3, cout = 1 + rng() % 3, n = 1 + rng() % 7;
      const bool normalize = t % 2 == 0, elu = t % 3 != 0;
      const Tensor a = oracle::random_tensor({cin, n, n}, rng);
      const Tensor w = oracle::random_tensor({cout, cin}, rng), h = oracle::random_tensor({cout, cin}, rng);
      ad::Graph g;
      const Tensor got =
          edge::edge_to_edge_conv(g.constant(a), g.constant(w), g.constant(h), normalize, elu).value();
      e2e = std::max(e2e, oracle::max_abs_diff(got, oracle::edge_to_edge(a, w, h, normalize, elu)));
    }
    {
      const std::size_t cin = 1 + rng() % 4, cout = 1 + rng() % 4, n = 1 + rng() % 8, dil = 1 + rng() % 4;
      const Tensor x = oracle::random_tensor({cin, n, n}, rng), k = oracle::random_tensor({cout, cin, 3, 3}, rng);
      ad::Graph g;
      conv = std::max(conv, oracle::max_abs_diff(ad::conv2d(g.constant(x), g.constant(k), dil).value(),
                                                 oracle::conv2d(x, k, dil)));
    }
    {
      node::NodePathConfig c;
      c.node_dim = 4, c.hidden = 1 + rng() % 4, c.edge_hidden = 1 + rng() % 5, c.readout_hidden = 3;
      c.bins = 2 + rng() % 3;
      ad::ParameterStore store;
      const node::NodePath path(store, c, rng);
      const auto& net = path.edge_network();
      const std::size_t n = 2 + rng() % 7;
      const Tensor h = oracle::random_tensor({n, c.hidden}, rng), probs = random_probs(n, c.bins, rng);
      ad::Graph g;
      const Tensor m = node::message_step(g, g.constant(h), g.constant(probs), net).value();
      msg = std::max(msg, oracle::max_abs_diff(
                              m, oracle::messages(h, probs, net.w1->value, net.b1->value, net.q->value)));
    }
    {
      const std::size_t bins = 2 + rng() % 3, n = 2 + rng() % 6;
      const Tensor logits = oracle::random_tensor({bins, n, n}, rng, -5, 5);
      std::vector<int> labels(n * n);
      std::vector<std::uint8_t> mask(n * n);
      for (std::size_t i = 0; i < n * n; ++i) {
        labels[i] = static_cast<int>(rng() % bins);
        mask[i] = rng() % 4 != 0;
      }
      mask[0] = 1;
      ad::Graph g;
      el = std::max(el, std::abs(training::edge_loss(g.constant(logits), labels, mask).value().item() -
                                 oracle::edge_loss(logits, labels, mask)));
    }
    {
      std::uniform_real_distribution<double> ang(-180, 180);
      const std::size_t n = 2 + rng() % 9;
      const Tensor v = oracle::random_tensor({n, 4}, rng);
      std::vector<double> phi(n), psi(n);
      std::vector<std::uint8_t> pm(n), sm(n);
      for (std::size_t i = 0; i < n; ++i) {
        phi[i] = ang(rng), psi[i] = ang(rng);
        pm[i] = rng() % 3 != 0, sm[i] = rng() % 3 != 0;
      }
      pm[0] = 0, pm[1] = 1, sm[n - 1] = 0;
      ad::Graph g;
      nl = std::max(nl, std::abs(training::node_loss(g.constant(v), phi, psi, pm, sm).value().item() -
                                 oracle::node_loss(v, phi, psi, pm, sm)));
    }
    {
      const std::size_t n = 10 + rng() % 50;
      std::uniform_real_distribution<double> u(0.0, 1.0), dist(3.0, 20.0);
      Tensor c({n, n}), d({n, n});
      const bool coarse = t % 2 == 0;  // coarse scores force ties
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
          c(i, j) = c(j, i) = coarse ? std::floor(u(rng) * 4) / 4 : u(rng);
          d(i, j) = d(j, i) = dist(rng);
        }
      std::vector<std::uint8_t> mask(n * n);
      for (auto& m : mask) m = rng() % 10 != 0;
      const auto range = eval::kRanges[t % 3];
      const std::size_t k = eval::kTopKDivisors[t % 4];
      const std::pair<std::size_t, std::size_t> bounds[] = {{6, 11}, {12, 23}, {24, 1u << 30}};
      const auto [lo, hi] = bounds[t % 3];
      if (eval::contact_accuracy_topk(c, d, mask, range, k).selected != oracle::topk_pairs(c, mask, lo, hi, k))
        ++topk_mismatch;
    }
  }
  const double worst = std::max({e2e, conv, msg, el, nl});
  return {worst <= 1e-12 && topk_mismatch == 0,
          "100 instances each; max |diff| e2e " + fmt("%.2g", e2e) + ", conv2d " + fmt("%.2g", conv) +
              ", message " + fmt("%.2g", msg) + ", edge loss " + fmt("%.2g", el) + ", node loss " +
              fmt("%.2g", nl) + "; top-k mismatches " + std::to_string(topk_mismatch)};
}

Outcome variable_length() {
  training::TrainingConfig c;
  c.node_dim = 20;
  const training::PgGnnModel model(c);
  std::mt19937_64 rng(4);
  std::string detail;
  bool ok = true;
  double t300 = 0;
  for (std::size_t n : {15, 50, 120, 300}) {
    const auto ex = training::make_example(protein::synthetic_protein("v", n, rng), c, {});
    const auto t0 = Clock::now();
    const auto p = model.predict(ex.input);
    const double secs = since(t0);
    if (n == 300) t300 = secs;
    ok = ok && p.edge.probabilities.shape() == ad::Shape{c.bins(), n, n} &&
         p.node.v.shape() == ad::Shape{n, 4} && p.node.phi.size() == n;
    detail += "L=" + std::to_string(n) + fmt(" %.2fs; ", secs);
  }
  return {ok && t300 < 60.0, detail + (ok ? "shapes B x L x L and L x 4" : "shape mismatch")};
}

Outcome overfit() {
  training::TrainingConfig c;
  c.max_epochs = 500;
  c.patience = 500;  // train = val here, early stopping is not the point
  c.node_dim = 20;
  const auto ex = examples(protein::synthetic_dataset(8, 20, 40, 2024), c);
  training::PgGnnModel model(c);
  training::Trainer trainer(model, c);
  const auto t0 = Clock::now();
  double acc = 0, phi = 1e9, psi = 1e9;
  std::size_t epochs = 0;
  training::FitOptions opt;
  opt.on_epoch = [&](const training::EpochRecord& r, const training::PgGnnModel&) {
    epochs = r.epoch;
    acc = r.validation["pair_accuracy"].get<double>();
    phi = r.validation["mae_phi"].get<double>();
    psi = r.validation["mae_psi"].get<double>();
    return !(acc >= 0.95 && phi <= 10.0 && psi <= 10.0) && since(t0) < 900.0;
  };
  training::fit(model, trainer, ex, ex, c, opt);
  const double secs = since(t0);
  return {acc >= 0.95 && phi <= 10.0 && psi <= 10.0 && secs < 900.0 && epochs <= 500,
          std::to_string(epochs) + " epochs, pair accuracy " + fmt("%.4f", acc) + ", MAE phi " + fmt("%.2f", phi) +
              " psi " + fmt("%.2f", psi) + ", " + fmt("%.0f s", secs)};
}

// Mean of the phi and psi MAE on held-out examples.
double node_mae(const training::PgGnnModel& model, const std::vector<training::Example>& test) {
  const auto s = training::validation_snapshot(model, test);
  return 0.5 * (s["mae_phi"].get<double>() + s["mae_psi"].get<double>());
}

void train_steps(training::PgGnnModel& model, training::Trainer& trainer,
                 const std::vector<training::Example>& train, std::size_t steps) {
  for (std::size_t s = 0; s < steps; ++s) {
    const training::Example* batch[] = {&train[s % train.size()]};
    trainer.step(batch);
  }
}

Outcome joint_vs_edge_only() {
  // Default architecture and optimizer; 480 steps is 60 passes over 8 proteins.
  training::TrainingConfig c;
  c.node_dim = 20;
  constexpr std::size_t kSteps = 480;
  int wins = 0;
  std::string detail;
  for (std::uint64_t seed : {11, 12, 13}) {
    c.seed = seed;
    const auto recs = protein::synthetic_dataset(12, 20, 32, 100 + seed);
    const std::vector<protein::ProteinRecord> tr(recs.begin(), recs.begin() + 8), te(recs.begin() + 8, recs.end());
    const auto train = examples(tr, c), test = examples(te, c);

    training::PgGnnModel joint(c);
    training::Trainer tj(joint, c);
    train_steps(joint, tj, train, kSteps);

    // Edge path alone, then the node path on top of the frozen edge path;
    // the two phases split the joint run's step budget.
    auto c0 = c;
    c0.lambda = 0.0;
    training::PgGnnModel staged(c0);
    {
      training::Trainer te0(staged, c0);
      train_steps(staged, te0, train, kSteps / 2);
    }
    staged.parameters().set_frozen_prefix("edge.", true);
    staged.parameters().set_frozen_prefix("pair", true);
    training::Trainer tn(staged, c);
    train_steps(staged, tn, train, kSteps - kSteps / 2);

    const double mj = node_mae(joint, test), ms = node_mae(staged, test);
    wins += mj <= ms;
    detail += "seed " + std::to_string(seed) + fmt(": joint %.2f", mj) + fmt(" vs staged %.2f; ", ms);
  }
  return {wins >= 2, detail + std::to_string(wins) + "/3 seeds favour joint (held-out node MAE, degrees)"};
}

Outcome determinism() {
  testutil::TempDir dir;
  training::TrainingConfig c;
  c.s_e = 2, c.n_conv = 2, c.dilations = {1, 2}, c.channels = 8, c.pair_dim = 4;
  c.s_v = 2, c.hidden_dim = 8, c.readout_hidden = 8;
  c.learning_rate = 1e-3, c.max_epochs = 3, c.node_dim = 20;
  const auto ex = examples(protein::synthetic_dataset(4, 12, 20, 7), c);

  auto train_once = [&] {
    training::PgGnnModel model(c);
    training::Trainer trainer(model, c);
    const auto r = training::fit(model, trainer, ex, ex, c);
    return std::pair{training::serialize_checkpoint(training::capture(model, trainer.adam(), 3, {}, nullptr)),
                     r.best.validation.dump()};
  };
  const auto a = train_once(), b = train_once();
  std::vector<std::string> broken;
  if (a != b) broken.push_back("training");

  const auto ckpt = training::deserialize_checkpoint(a.first);
  training::save_checkpoint(dir / "a.ckpt", ckpt);
  if (!(training::load_checkpoint(dir / "a.ckpt") == ckpt) || training::serialize_checkpoint(ckpt) != a.first)
    broken.push_back("checkpoint");

  training::PgGnnModel model(c);
  training::restore(model, ckpt);
  const auto pred = model.predict(ex[0].input);
  eval::write_contacts(dir / "x.contacts", pred.edge);
  const auto back = eval::read_contacts(dir / "x.contacts");
  const std::size_t n = ex[0].input.length;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && (back.contact_map(i, j) != pred.edge.contact_map(i, j) ||
                     back.probabilities(1, i, j) != pred.edge.probabilities(1, i, j))) {
        broken.push_back("contacts");
        i = n;
        break;
      }
  const auto angles = eval::predicted_angles(pred.node);
  eval::write_angles(dir / "x.angles", angles);
  if (!(eval::read_angles(dir / "x.angles") == angles)) broken.push_back("angles");

  std::mt19937_64 rng(8);
  const Tensor nf = oracle::random_tensor({n, 5}, rng, -1e3, 1e3), ef = oracle::random_tensor({n, n, 2}, rng);
  features::write_node_feature_file(dir / "n.feat", nf);
  features::write_edge_feature_file(dir / "e.feat", ef);
  if (!(features::read_node_feature_file(dir / "n.feat", n) == nf) ||
      !(features::read_edge_feature_file(dir / "e.feat", n) == ef))
    broken.push_back("features");

  const auto rec = protein::synthetic_protein("w", 30, rng);
  const std::string pdb = protein::write_pdb_backbone(rec);
  if (protein::write_pdb_backbone(protein::parse_pdb_backbone(pdb, 'A', "w")) != pdb) broken.push_back("pdb");

  protein::DatasetManifest m;
  testutil::write_text(dir / "w.pdb", pdb);
  m.entries.push_back({"w", dir / "w.pdb", 'A', dir / "n.feat", std::nullopt, protein::Split::test});
  protein::write_manifest(dir / "m.tsv", m);
  if (!(protein::load_manifest(dir / "m.tsv").entries == m.entries)) broken.push_back("manifest");

  eval::MetricsReport r;
  r.version = eval::library_version();
  r.split = "train";
  r.config = training::to_json(c);
  for (const auto& e : ex) {
    const auto p = model.predict(e.input);
    r.proteins.push_back(eval::protein_metrics(e.id(), p.edge.contact_map, p.node.phi, p.node.psi, e.target));
  }
  r.dataset = eval::aggregate(r.proteins, r.aggregation);
  if (!(eval::parse_report(eval::render_report(r)) == r)) broken.push_back("report");

  std::string detail = "two seeded runs byte-identical; checkpoint, contacts, angles, features, pdb, manifest, report";
  if (!broken.empty()) {
    detail = "mismatch in:";
    for (const auto& s : broken) detail += " " + s;
  }
  return {broken.empty(), detail};
}

Outcome metric_sanity() {
  std::mt19937_64 rng(90);
  std::uniform_real_distribution<double> u(-180, 180);
  std::vector<double> p(100000), t(100000);
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = u(rng), t[i] = u(rng);
  const double mae = *eval::angle_mae(p, t, std::vector<std::uint8_t>(p.size(), 1));

  // Every cell of per-protein and pooled/mean dataset rows.
  std::size_t cells = 0, bad = 0;
  auto check_row = [&](const auto& topk) {
    for (const auto& row : topk)
      for (const auto& cell : row) {
        if (cell.acc.has_value() != cell.err.has_value()) ++bad;
        if (cell.acc) {
          ++cells;
          if (*cell.err != 1.0 - *cell.acc) ++bad;
        }
      }
  };
  std::vector<eval::ProteinMetrics> proteins;
  for (int k = 0; k < 12; ++k) {
    const auto rec = protein::synthetic_protein("s" + std::to_string(k), 20 + rng() % 81, rng);
    const auto truth = protein::derive_targets(rec, protein::DistanceBinSpec::binary());
    const std::size_t n = rec.length();
    Tensor c({n, n});
    std::uniform_real_distribution<double> unit(0, 1);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) c(i, j) = c(j, i) = unit(rng);
    std::vector<double> phi(n), psi(n);
    for (std::size_t i = 0; i < n; ++i) phi[i] = u(rng), psi[i] = u(rng);
    proteins.push_back(eval::protein_metrics(rec.id, c, phi, psi, truth));
    check_row(proteins.back().topk);
  }
  check_row(eval::aggregate(proteins, eval::Aggregation::protein_mean).topk);
  check_row(eval::aggregate(proteins, eval::Aggregation::pair_pooled).topk);
  return {std::abs(mae - 90.0) <= 1.0 && bad == 0 && cells > 0,
          "uniform MAE " + fmt("%.3f deg", mae) + " over 1e5; " + std::to_string(cells) + " cells, " +
              std::to_string(bad) + " with ERR != 1 - ACC"};
}

}  // namespace

int main() {
  run(1, "gradient integrity", gradients);
  run(2, "rigid-motion invariance", rigid_motion);
  run(3, "oracle equivalence", oracles);
  run(4, "variable-length contract", variable_length);
  run(5, "miniature overfit", overfit);
  run(6, "joint vs edge-only", joint_vs_edge_only);
  run(7, "determinism and round-trips", determinism);
  run(8, "metric sanity", metric_sanity);
  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
