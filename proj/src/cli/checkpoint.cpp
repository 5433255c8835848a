#include "slotzero/cli/checkpoint.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "slotzero/cli/config.hpp"
#include "slotzero/slots/encoder.hpp"

namespace sz::cli {

namespace {

constexpr char kMagic[8] = {'S', 'Z', 'C', 'K', 'P', 'T', 0, 0};

class Writer {
 public:
  template <class T>
  void pod(T v) {
    static_assert(std::is_trivially_copyable_v<T>);
    const auto* p = reinterpret_cast<const char*>(&v);
    out_.append(p, sizeof(T));
  }
  void u64(std::uint64_t v) { pod(v); }
  void i64(std::int64_t v) { pod(v); }
  void f64(double v) { pod(v); }
  void flag(bool v) { pod<std::uint8_t>(v ? 1 : 0); }
  void str(const std::string& s) {
    u64(s.size());
    out_.append(s);
  }
  void doubles(std::span<const double> v) {
    u64(v.size());
    for (double x : v) f64(x);
  }
  std::string& bytes() { return out_; }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view data) : data_(data) {}
  template <class T>
  T pod() {
    if (pos_ + sizeof(T) > data_.size()) throw CheckpointError("checkpoint: payload ends early");
    T v;
    std::memcpy(&v, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::uint64_t u64() { return pod<std::uint64_t>(); }
  std::int64_t i64() { return pod<std::int64_t>(); }
  double f64() { return pod<double>(); }
  bool flag() { return pod<std::uint8_t>() != 0; }
  std::size_t count() {
    const auto n = u64();
    if (n > data_.size() - pos_) throw CheckpointError("checkpoint: implausible length field");
    return static_cast<std::size_t>(n);
  }
  std::string str() {
    const auto n = count();
    std::string s(data_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  std::vector<double> doubles() {
    const auto n = count();
    std::vector<double> v(n);
    for (auto& x : v) x = f64();
    return v;
  }
  bool done() const { return pos_ == data_.size(); }

 private:
  std::string_view data_;
  std::size_t pos_ = 0;
};

void put_slots(Writer& w, const slots::SlotSet& s) {
  w.u64(s.slots());
  w.u64(s.dim());
  w.doubles(s.values());
}

slots::SlotSet get_slots(Reader& r) {
  const auto k = r.u64();
  const auto d = r.u64();
  auto v = r.doubles();
  if (v.size() != k * d) throw CheckpointError("checkpoint: slot set size mismatch");
  return slots::SlotSet(k, d, std::move(v));
}

void put_action(Writer& w, const model::ModelAction& a) {
  if (const int* i = std::get_if<int>(&a)) {
    w.pod<std::uint8_t>(0);
    w.i64(*i);
  } else {
    w.pod<std::uint8_t>(1);
    w.doubles(std::get<std::vector<double>>(a));
  }
}

model::ModelAction get_action(Reader& r) {
  const auto tag = r.pod<std::uint8_t>();
  if (tag == 0) return static_cast<int>(r.i64());
  if (tag == 1) return r.doubles();
  throw CheckpointError("checkpoint: bad action tag");
}

void put_record(Writer& w, const trainer::TransitionRecord& rec) {
  put_slots(w, rec.slots);
  put_slots(w, rec.next_slots);
  put_action(w, rec.action);
  w.f64(rec.reward);
  w.flag(rec.done);
  w.flag(rec.truncated);
  w.doubles(rec.policy);
  w.u64(rec.candidates.size());
  for (const auto& c : rec.candidates) put_action(w, c);
  w.f64(rec.search_value);
  w.u64(rec.episode);
  w.i64(rec.position);
  w.i64(rec.insertion_iteration);
}

trainer::TransitionRecord get_record(Reader& r) {
  trainer::TransitionRecord rec;
  rec.slots = get_slots(r);
  rec.next_slots = get_slots(r);
  rec.action = get_action(r);
  rec.reward = r.f64();
  rec.done = r.flag();
  rec.truncated = r.flag();
  rec.policy = r.doubles();
  const auto n = r.count();
  for (std::size_t i = 0; i < n; ++i) rec.candidates.push_back(get_action(r));
  rec.search_value = r.f64();
  rec.episode = r.u64();
  rec.position = r.i64();
  rec.insertion_iteration = r.i64();
  return rec;
}

void put_env_state(Writer& w, const env::EnvState& s) {
  w.u64(s.objects.size());
  for (const auto& o : s.objects) {
    w.i64(o.id);
    w.i64(static_cast<std::int64_t>(o.kind));
    w.f64(o.position.x);
    w.f64(o.position.y);
  }
  w.i64(s.step);
  w.flag(s.terminal);
}

env::EnvState get_env_state(Reader& r) {
  env::EnvState s;
  const auto n = r.count();
  for (std::size_t i = 0; i < n; ++i) {
    env::ObjectState o;
    o.id = static_cast<int>(r.i64());
    o.kind = static_cast<env::ObjectKind>(r.i64());
    o.position.x = r.f64();
    o.position.y = r.f64();
    s.objects.push_back(o);
  }
  s.step = static_cast<int>(r.i64());
  s.terminal = r.flag();
  return s;
}

void put_row(Writer& w, const trainer::MetricsRow& m) {
  w.pod<std::uint8_t>(m.kind == trainer::RowKind::train ? 0 : 1);
  w.i64(m.iteration);
  w.i64(m.env_steps);
  for (double v : {m.loss_total, m.loss_reward, m.loss_policy, m.loss_value, m.loss_consistency,
                   m.grad_norm}) {
    w.f64(v);
  }
  w.i64(m.td_branch);
  w.i64(m.search_branch);
  w.f64(m.eval_success);
  w.f64(m.eval_return_mean);
  w.f64(m.eval_return_std);
  w.i64(m.faults);
}

trainer::MetricsRow get_row(Reader& r) {
  trainer::MetricsRow m;
  m.kind = r.pod<std::uint8_t>() == 0 ? trainer::RowKind::train : trainer::RowKind::eval;
  m.iteration = r.i64();
  m.env_steps = r.i64();
  m.loss_total = r.f64();
  m.loss_reward = r.f64();
  m.loss_policy = r.f64();
  m.loss_value = r.f64();
  m.loss_consistency = r.f64();
  m.grad_norm = r.f64();
  m.td_branch = r.i64();
  m.search_branch = r.i64();
  m.eval_success = r.f64();
  m.eval_return_mean = r.f64();
  m.eval_return_std = r.f64();
  m.faults = r.i64();
  return m;
}

std::uint32_t checksum(std::string_view data) {
  uLong crc = crc32(0L, Z_NULL, 0);
  std::size_t pos = 0;
  while (pos < data.size()) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(data.size() - pos, 1u << 30));
    crc = crc32(crc, reinterpret_cast<const Bytef*>(data.data() + pos), chunk);
    pos += chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

}  // namespace

std::string encode_checkpoint(const trainer::RunConfig& config, const trainer::TrainingState& s) {
  Writer w;
  w.str(serialize_config(config));
  w.str(slots::FeatureLayout::describe());
  w.i64(slots::FeatureLayout::kVersion);

  const auto named = s.params.named();
  w.u64(named.size());
  for (const auto& p : named) {
    w.str(p.name);
    w.doubles(p.tensor.values());
  }
  w.i64(s.adam.steps);
  w.u64(s.adam.m.size());
  for (std::size_t i = 0; i < s.adam.m.size(); ++i) {
    w.doubles(s.adam.m[i]);
    w.doubles(s.adam.v[i]);
  }

  w.i64(s.iteration);
  w.i64(s.env_steps);
  w.u64(s.episodes);
  w.f64(s.train_credit);
  w.i64(s.faults);
  w.flag(s.stopped);

  w.i64(s.buffer.capacity());
  w.i64(s.buffer.total_inserted());
  w.u64(s.buffer.size());
  for (const auto& rec : s.buffer.records()) put_record(w, rec);

  w.flag(s.episode.has_value());
  if (s.episode) {
    const auto& e = *s.episode;
    for (auto seed : {e.seeds.reset, e.seeds.permutation, e.seeds.noise, e.seeds.search}) w.u64(seed);
    w.u64(e.episode_id);
    put_env_state(w, e.state);
    w.i64(e.steps);
    w.f64(e.total_return);
    w.flag(e.finished);
    w.flag(e.success);
    w.u64(e.records.size());
    for (const auto& rec : e.records) put_record(w, rec);
  }

  w.u64(s.metrics.size());
  for (const auto& m : s.metrics) put_row(w, m);

  const std::string& payload = w.bytes();
  Writer file;
  file.bytes().append(kMagic, sizeof kMagic);
  file.pod<std::uint32_t>(kCheckpointVersion);
  file.u64(payload.size());
  file.bytes().append(payload);
  file.pod<std::uint32_t>(checksum(payload));
  return std::move(file.bytes());
}

Checkpoint decode_checkpoint(const std::string& bytes) {
  constexpr std::size_t header = sizeof kMagic + sizeof(std::uint32_t) + sizeof(std::uint64_t);
  if (bytes.size() < header || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) {
    throw CheckpointError("checkpoint: not a slotzero checkpoint");
  }
  Reader head(std::string_view(bytes).substr(sizeof kMagic, header - sizeof kMagic));
  const auto version = head.pod<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw CheckpointError("checkpoint: version " + std::to_string(version) + " is not supported (expected " +
                          std::to_string(kCheckpointVersion) + ")");
  }
  const auto size = head.u64();
  if (bytes.size() != header + size + sizeof(std::uint32_t)) {
    throw CheckpointError("checkpoint: checksum mismatch (file is truncated or has trailing bytes)");
  }
  const std::string_view payload = std::string_view(bytes).substr(header, size);
  std::uint32_t stored;
  std::memcpy(&stored, bytes.data() + header + size, sizeof stored);
  if (stored != checksum(payload)) throw CheckpointError("checkpoint: checksum mismatch");

  Reader r(payload);
  Checkpoint ck;
  ck.version = version;
  try {
    ck.config = parse_config(r.str());
  } catch (const ConfigError& e) {
    throw CheckpointError(std::string("checkpoint: embedded config rejected: ") + e.what());
  }
  ck.feature_layout = r.str();
  if (r.i64() != slots::FeatureLayout::kVersion) {
    throw CheckpointError("checkpoint: feature layout version differs from this build");
  }

  auto& s = ck.state;
  s.params = model::init_params(ck.config.model, 0);
  const auto named = s.params.named();
  if (r.u64() != named.size()) throw CheckpointError("checkpoint: parameter tensor count mismatch");
  for (const auto& p : named) {
    const auto name = r.str();
    auto values = r.doubles();
    if (name != p.name || values.size() != p.tensor.numel()) {
      throw CheckpointError("checkpoint: parameter '" + name + "' does not match the model layout");
    }
    Tensor t = p.tensor;
    std::copy(values.begin(), values.end(), t.mutable_values().begin());
  }
  s.adam.steps = r.i64();
  const auto moments = r.count();
  for (std::size_t i = 0; i < moments; ++i) {
    s.adam.m.push_back(r.doubles());
    s.adam.v.push_back(r.doubles());
  }

  s.iteration = r.i64();
  s.env_steps = r.i64();
  s.episodes = r.u64();
  s.train_credit = r.f64();
  s.faults = r.i64();
  s.stopped = r.flag();

  const auto capacity = r.i64();
  const auto total = r.i64();
  const auto n = r.count();
  std::deque<trainer::TransitionRecord> records;
  for (std::size_t i = 0; i < n; ++i) records.push_back(get_record(r));
  try {
    s.buffer = trainer::ReplayBuffer::restore(capacity, total, std::move(records));
  } catch (const std::invalid_argument& e) {
    throw CheckpointError(std::string("checkpoint: ") + e.what());
  }

  if (r.flag()) {
    trainer::EpisodeProgress e;
    e.seeds.reset = r.u64();
    e.seeds.permutation = r.u64();
    e.seeds.noise = r.u64();
    e.seeds.search = r.u64();
    e.episode_id = r.u64();
    e.state = get_env_state(r);
    e.steps = static_cast<int>(r.i64());
    e.total_return = r.f64();
    e.finished = r.flag();
    e.success = r.flag();
    const auto m = r.count();
    for (std::size_t i = 0; i < m; ++i) e.records.push_back(get_record(r));
    s.episode = std::move(e);
  }

  const auto rows = r.count();
  for (std::size_t i = 0; i < rows; ++i) s.metrics.push_back(get_row(r));
  if (!r.done()) throw CheckpointError("checkpoint: unexpected bytes after the payload");
  return ck;
}

void save_checkpoint(const std::filesystem::path& path, const trainer::RunConfig& config,
                     const trainer::TrainingState& state) {
  const std::string bytes = encode_checkpoint(config, state);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw CheckpointError("checkpoint: cannot write " + tmp);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw CheckpointError("checkpoint: write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("checkpoint: cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return decode_checkpoint(buf.str());
}

}  // namespace sz::cli
