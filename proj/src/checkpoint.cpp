#include "ong/checkpoint.h"

#include <cstdint>
#include <fstream>

#include "ong/json_io.h"

namespace ong {

namespace {

constexpr char kMagic[] = "ONGCKPT1";
constexpr std::uint8_t kDtypeF64 = 1;

template <class T>
void write_pod(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <class T>
T read_pod(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!in) throw CheckpointError("truncated checkpoint");
  return v;
}

void write_tensor(std::ostream& out, const nn::Tensor& t) {
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(t.name.size()));
  out.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
  write_pod<std::uint8_t>(out, kDtypeF64);
  write_pod<std::uint32_t>(out, 2);
  write_pod<std::uint64_t>(out, static_cast<std::uint64_t>(t.value.rows()));
  write_pod<std::uint64_t>(out, static_cast<std::uint64_t>(t.value.cols()));
  for (Eigen::Index i = 0; i < t.value.rows(); ++i)
    for (Eigen::Index j = 0; j < t.value.cols(); ++j)
      write_pod<double>(out, t.value(i, j));
}

}  // namespace

void save_checkpoint(const std::string& path, ModelState& state,
                     double best_dev_f1, int best_epoch) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("cannot write " + path);
  out.write(kMagic, 8);

  Json meta;
  meta["version"] = 1;
  meta["config"] = state.cfg;
  meta["vocab"] = state.vocab.words;
  meta["best_dev_f1"] = best_dev_f1;
  meta["best_epoch"] = best_epoch;
  const std::string meta_str = meta.dump();
  write_pod<std::uint64_t>(out, meta_str.size());
  out.write(meta_str.data(), static_cast<std::streamsize>(meta_str.size()));

  const auto params = state.parameters();
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(params.size()));
  for (const nn::Tensor* t : params) write_tensor(out, *t);
  if (!out) throw CheckpointError("write failure on " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::string(magic, 8) != kMagic)
    throw CheckpointError("bad magic in " + path);

  const auto meta_len = read_pod<std::uint64_t>(in);
  std::string meta_str(meta_len, '\0');
  in.read(meta_str.data(), static_cast<std::streamsize>(meta_len));
  if (!in) throw CheckpointError("truncated checkpoint");
  Json meta = Json::parse(meta_str);
  if (meta.at("version").get<int>() != 1)
    throw CheckpointError("unsupported checkpoint version");

  Checkpoint ck;
  ck.best_dev_f1 = meta.at("best_dev_f1").get<double>();
  ck.best_epoch = meta.at("best_epoch").get<int>();
  auto cfg = meta.at("config").get<ModelConfig>();
  auto vocab =
      Vocab::from_words(meta.at("vocab").get<std::vector<std::string>>());
  ck.state = ModelState::create(cfg, std::move(vocab), 0);

  auto named = ck.state.named_parameters();
  const auto count = read_pod<std::uint32_t>(in);
  if (count != named.size())
    throw CheckpointError("tensor count mismatch in " + path);
  for (std::uint32_t k = 0; k < count; ++k) {
    const auto name_len = read_pod<std::uint32_t>(in);
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    if (read_pod<std::uint8_t>(in) != kDtypeF64)
      throw CheckpointError("unsupported dtype for tensor " + name);
    if (read_pod<std::uint32_t>(in) != 2)
      throw CheckpointError("unsupported rank for tensor " + name);
    const auto rows = read_pod<std::uint64_t>(in);
    const auto cols = read_pod<std::uint64_t>(in);
    auto it = named.find(name);
    if (it == named.end())
      throw CheckpointError("unexpected tensor " + name);
    nn::Tensor& t = *it->second;
    if (rows != static_cast<std::uint64_t>(t.value.rows()) ||
        cols != static_cast<std::uint64_t>(t.value.cols()))
      throw CheckpointError("shape mismatch for tensor " + name);
    for (std::uint64_t i = 0; i < rows; ++i)
      for (std::uint64_t j = 0; j < cols; ++j)
        t.value(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            read_pod<double>(in);
  }
  return ck;
}

}  // namespace ong
