#include "pgnn/training/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "pgnn/errors.hpp"
#include "pgnn/training/model.hpp"

namespace pgnn::training {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

namespace {

class Writer {
 public:
  template <typename T>
  void pod(T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out_.append(buf, sizeof(T));
  }
  void str(const std::string& s) {
    pod<std::uint64_t>(s.size());
    out_.append(s);
  }
  void tensor(const ad::Tensor& t) {
    pod<std::uint32_t>(static_cast<std::uint32_t>(t.rank()));
    for (auto e : t.shape()) pod<std::uint64_t>(e);
    const auto d = t.data();
    out_.append(reinterpret_cast<const char*>(d.data()), d.size() * sizeof(double));
  }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(const std::string& in) : in_(in) {}

  template <typename T>
  T pod() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, in_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string str() {
    const auto n = pod<std::uint64_t>();
    need(n);
    std::string s = in_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  ad::Tensor tensor() {
    const auto rank = pod<std::uint32_t>();
    if (rank == 0 || rank > 8) throw ValidationError("checkpoint: bad tensor rank");
    ad::Shape shape(rank);
    std::uint64_t count = 1;
    for (auto& e : shape) {
      e = pod<std::uint64_t>();
      if (e == 0 || count > (in_.size() - pos_) / e)
        throw ValidationError("checkpoint: bad tensor extents");
      count *= e;
    }
    need(count * sizeof(double));
    std::vector<double> values(count);
    std::memcpy(values.data(), in_.data() + pos_, count * sizeof(double));
    pos_ += count * sizeof(double);
    return ad::Tensor(std::move(shape), std::move(values));
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  void need(std::uint64_t n) const {
    if (n > in_.size() - pos_) throw ValidationError("checkpoint: truncated file");
  }
  const std::string& in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string serialize_checkpoint(const Checkpoint& ckpt) {
  Writer w;
  w.pod('P');
  w.pod('G');
  w.pod('N');
  w.pod('N');
  w.pod<std::uint32_t>(ckpt.version);
  w.pod<std::uint64_t>(ckpt.parameters.size());
  for (const auto& [name, value] : ckpt.parameters) {
    w.str(name);
    w.tensor(value);
  }
  const auto& a = ckpt.adam;
  w.pod<std::uint64_t>(a.step);
  w.pod<double>(a.options.learning_rate);
  w.pod<double>(a.options.beta1);
  w.pod<double>(a.options.beta2);
  w.pod<double>(a.options.epsilon);
  if (a.first_moment.size() != a.second_moment.size())
    throw ContractError("checkpoint: Adam moment lists differ in length");
  w.pod<std::uint64_t>(a.first_moment.size());
  for (std::size_t i = 0; i < a.first_moment.size(); ++i) {
    w.tensor(a.first_moment[i]);
    w.tensor(a.second_moment[i]);
  }
  const nlohmann::json doc{{"config", to_json(ckpt.config)},
                           {"epoch", ckpt.epoch},
                           {"validation", ckpt.validation},
                           {"feature_standardizer", ckpt.feature_standardizer}};
  w.str(doc.dump());
  return w.take();
}

Checkpoint deserialize_checkpoint(const std::string& bytes) {
  if (bytes.size() < 8 || bytes.compare(0, 4, "PGNN") != 0)
    throw ValidationError("checkpoint: missing PGNN magic");
  Reader r(bytes);
  for (int i = 0; i < 4; ++i) r.pod<char>();
  Checkpoint c;
  c.version = r.pod<std::uint32_t>();
  if (c.version != kCheckpointVersion)
    throw ValidationError("checkpoint: unsupported format version " + std::to_string(c.version));
  const auto n = r.pod<std::uint64_t>();
  for (std::uint64_t i = 0; i < n; ++i) {
    std::string name = r.str();
    c.parameters.emplace_back(std::move(name), r.tensor());
  }
  c.adam.step = r.pod<std::uint64_t>();
  c.adam.options.learning_rate = r.pod<double>();
  c.adam.options.beta1 = r.pod<double>();
  c.adam.options.beta2 = r.pod<double>();
  c.adam.options.epsilon = r.pod<double>();
  const auto m = r.pod<std::uint64_t>();
  for (std::uint64_t i = 0; i < m; ++i) {
    c.adam.first_moment.push_back(r.tensor());
    c.adam.second_moment.push_back(r.tensor());
  }
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(r.str());
    c.config = config_from_json(doc.at("config"));
    c.epoch = doc.at("epoch").get<std::uint64_t>();
    c.validation = doc.at("validation");
    c.feature_standardizer = doc.at("feature_standardizer");
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("checkpoint: bad JSON section: ") + e.what());
  }
  if (!r.done()) throw ValidationError("checkpoint: trailing bytes");
  return c;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  const std::string bytes = serialize_checkpoint(ckpt);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write checkpoint " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("short write to checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("checkpoint not found: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize_checkpoint(ss.str());
}

Checkpoint capture(const PgGnnModel& model, const ad::AdamState& adam, std::uint64_t epoch,
                   nlohmann::json validation, const features::FeatureStandardizer* standardizer) {
  Checkpoint c;
  for (const auto& p : model.parameters()) c.parameters.emplace_back(p.name, p.value);
  c.adam = adam;
  c.epoch = epoch;
  c.validation = std::move(validation);
  c.config = model.config();
  if (standardizer && standardizer->fitted()) c.feature_standardizer = standardizer->to_json();
  return c;
}

void restore(PgGnnModel& model, const Checkpoint& ckpt) {
  auto& store = model.parameters();
  if (ckpt.parameters.size() != store.size())
    throw ValidationError("checkpoint has " + std::to_string(ckpt.parameters.size()) +
                          " tensors, model has " + std::to_string(store.size()));
  for (const auto& [name, value] : ckpt.parameters) {
    if (!store.contains(name)) throw ValidationError("checkpoint tensor '" + name + "' not in model");
    auto& p = store.get(name);
    if (p.value.shape() != value.shape())
      throw ValidationError("checkpoint tensor '" + name + "' has shape " +
                            ad::shape_str(value.shape()) + ", model expects " +
                            ad::shape_str(p.value.shape()));
    p.value = value;
  }
}

}  // namespace pgnn::training
