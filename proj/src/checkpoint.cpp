#include "spt/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "spt/config_json.hpp"
#include "spt/error.hpp"

namespace spt {
namespace {

constexpr char kMagic[8] = {'S', 'P', 'T', 'C', 'K', 'P', 'T', '\0'};
constexpr std::uint32_t kVersion = 1;

class Writer {
 public:
  void bytes(const void* p, std::size_t n) { buf_.append(static_cast<const char*>(p), n); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }
  void f32(float f) {
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    u32(bits);
  }
  const std::string& data() const { return buf_; }

 private:
  std::string buf_;
};

class Reader {
 public:
  explicit Reader(std::string data) : data_(std::move(data)) {}
  void need(std::size_t n) {
    if (pos_ + n > data_.size()) throw CheckpointError("checkpoint truncated");
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    pos_ += 8;
    return v;
  }
  std::string str() {
    auto n = u32();
    need(n);
    std::string s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  float f32() {
    std::uint32_t bits = u32();
    float f;
    std::memcpy(&f, &bits, 4);
    return f;
  }
  std::string raw(std::size_t n) {
    need(n);
    std::string s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == data_.size(); }

 private:
  std::string data_;
  std::size_t pos_ = 0;
};

void write_tensor(Writer& w, const std::string& name, const Matrix<float>& t) {
  w.str(name);
  w.u32(static_cast<std::uint32_t>(t.rows()));
  w.u32(static_cast<std::uint32_t>(t.cols()));
  for (Eigen::Index i = 0; i < t.size(); ++i) w.f32(t.data()[i]);
}

}  // namespace

void save_checkpoint(const std::string& path, const ModelBundle& b, const PromptVocab& vocab,
                     const CheckpointMeta& meta) {
  Writer w;
  w.bytes(kMagic, sizeof kMagic);
  w.u32(kVersion);
  w.u64(vocab_hash(vocab));
  nlohmann::json header = {{"model", b.config},
                           {"template", meta.tmpl},
                           {"fallback_label", meta.fallback_label},
                           {"epochs_completed", meta.epochs_completed},
                           {"optimizer_step", b.optimizer.step},
                           {"extra", meta.extra}};
  w.str(header.dump());

  std::uint32_t count = 0;
  visit_tensors(b.params, [&](const std::string&, const Matrix<float>&) { count += 3; });
  w.u32(count);
  visit_tensors(b.params, [&](const std::string& n, const Matrix<float>& t) { write_tensor(w, n, t); });
  visit_tensors(b.optimizer.first_moment,
                [&](const std::string& n, const Matrix<float>& t) { write_tensor(w, "opt.m." + n, t); });
  visit_tensors(b.optimizer.second_moment,
                [&](const std::string& n, const Matrix<float>& t) { write_tensor(w, "opt.v." + n, t); });

  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("cannot write checkpoint '" + path + "'");
  out.write(w.data().data(), static_cast<std::streamsize>(w.data().size()));
  if (!out) throw CheckpointError("failed writing checkpoint '" + path + "'");
}

LoadedCheckpoint load_checkpoint(const std::string& path, const PromptVocab* vocab) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  Reader r(buf.str());

  if (r.raw(sizeof kMagic) != std::string(kMagic, sizeof kMagic)) {
    throw CheckpointError(path + ": not a checkpoint file");
  }
  if (auto v = r.u32(); v != kVersion) {
    throw CheckpointError(path + ": unsupported checkpoint version " + std::to_string(v));
  }
  LoadedCheckpoint lc;
  lc.vocab_hash = r.u64();
  if (vocab && vocab_hash(*vocab) != lc.vocab_hash) {
    throw CheckpointError(path + ": vocabulary does not match the one the model was trained with");
  }
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(r.str());
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(path + ": corrupt header: " + e.what());
  }
  ModelConfig config = header.at("model").get<ModelConfig>();
  config.validate();
  lc.meta.tmpl = header.at("template").get<TemplateConfig>();
  lc.meta.fallback_label = header.value("fallback_label", std::string());
  lc.meta.epochs_completed = header.value("epochs_completed", 0);
  lc.meta.extra = header.value("extra", nlohmann::json::object());

  std::map<std::string, Matrix<float>> tensors;
  const auto count = r.u32();
  for (std::uint32_t i = 0; i < count; ++i) {
    std::string name = r.str();
    const auto rows = r.u32(), cols = r.u32();
    r.need(static_cast<std::size_t>(rows) * cols * 4);
    Matrix<float> t(rows, cols);
    for (Eigen::Index k = 0; k < t.size(); ++k) t.data()[k] = r.f32();
    tensors.emplace(std::move(name), std::move(t));
  }
  if (!r.done()) throw CheckpointError(path + ": trailing bytes after tensor records");

  ModelBundle& b = lc.bundle;
  b.config = config;
  b.params = zero_parameters<float>(config);
  b.optimizer.first_moment = zero_parameters<float>(config);
  b.optimizer.second_moment = zero_parameters<float>(config);
  b.optimizer.step = header.value("optimizer_step", 0L);
  auto take = [&](const std::string& name, Matrix<float>& dst) {
    auto it = tensors.find(name);
    if (it == tensors.end()) throw CheckpointError(path + ": missing tensor '" + name + "'");
    if (it->second.rows() != dst.rows() || it->second.cols() != dst.cols()) {
      throw CheckpointError(path + ": tensor '" + name + "' has the wrong shape");
    }
    dst = std::move(it->second);
  };
  visit_tensors(b.params, [&](const std::string& n, Matrix<float>& t) { take(n, t); });
  visit_tensors(b.optimizer.first_moment, [&](const std::string& n, Matrix<float>& t) { take("opt.m." + n, t); });
  visit_tensors(b.optimizer.second_moment, [&](const std::string& n, Matrix<float>& t) { take("opt.v." + n, t); });
  return lc;
}

}  // namespace spt
