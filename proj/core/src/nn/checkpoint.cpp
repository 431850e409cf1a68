#include "lcbench/nn/checkpoint.hpp"

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace lcbench::nn {

namespace {

constexpr std::array<char, 8> kMagic = {'L', 'C', 'B', 'N', 'E', 'T', '\0', '\0'};
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ofstream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

void write_f64(std::ofstream& out, double d) {
  std::uint64_t v;
  std::memcpy(&v, &d, 8);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint32_t read_u32(std::ifstream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw CheckpointError("truncated payload");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

double read_f64(std::ifstream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) throw CheckpointError("truncated payload");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  double d;
  std::memcpy(&d, &v, 8);
  return d;
}

}  // namespace

void save_checkpoint(const std::string& path, const std::vector<const Mlp*>& nets) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("cannot open for writing: " + path);
  out.write(kMagic.data(), kMagic.size());
  write_u32(out, kVersion);
  write_u32(out, static_cast<std::uint32_t>(nets.size()));
  for (const Mlp* net : nets) {
    write_u32(out, static_cast<std::uint32_t>(net->layer_sizes.size()));
    for (int s : net->layer_sizes) write_u32(out, static_cast<std::uint32_t>(s));
    for (Activation a : net->activations) out.put(static_cast<char>(a));
    for (std::size_t l = 0; l < net->layer_count(); ++l) {
      const auto& w = net->weights[l];
      for (Eigen::Index r = 0; r < w.rows(); ++r)
        for (Eigen::Index c = 0; c < w.cols(); ++c) write_f64(out, w(r, c));
      const auto& b = net->biases[l];
      for (Eigen::Index i = 0; i < b.size(); ++i) write_f64(out, b(i));
    }
  }
  if (!out) throw CheckpointError("write failed: " + path);
}

std::vector<Mlp> load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open: " + path);
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic)
    throw CheckpointError("not a checkpoint: " + path);
  const std::uint32_t version = read_u32(in);
  if (version != kVersion)
    throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
  const std::uint32_t count = read_u32(in);
  if (count > 64) throw CheckpointError("not a checkpoint: implausible network count");

  std::vector<Mlp> nets;
  nets.reserve(count);
  for (std::uint32_t n = 0; n < count; ++n) {
    const std::uint32_t n_sizes = read_u32(in);
    if (n_sizes < 2 || n_sizes > 64) throw CheckpointError("not a checkpoint: bad layer table");
    Mlp net;
    for (std::uint32_t i = 0; i < n_sizes; ++i) {
      const std::uint32_t s = read_u32(in);
      if (s == 0 || s > (1u << 20)) throw CheckpointError("not a checkpoint: bad layer size");
      net.layer_sizes.push_back(static_cast<int>(s));
    }
    for (std::uint32_t l = 0; l + 1 < n_sizes; ++l) {
      int c = in.get();
      if (c == EOF) throw CheckpointError("truncated payload");
      if (c > 2) throw CheckpointError("not a checkpoint: bad activation tag");
      net.activations.push_back(static_cast<Activation>(c));
    }
    for (std::uint32_t l = 0; l + 1 < n_sizes; ++l) {
      Eigen::MatrixXd w(net.layer_sizes[l], net.layer_sizes[l + 1]);
      for (Eigen::Index r = 0; r < w.rows(); ++r)
        for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = read_f64(in);
      Eigen::VectorXd b(net.layer_sizes[l + 1]);
      for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = read_f64(in);
      net.weights.push_back(std::move(w));
      net.biases.push_back(std::move(b));
    }
    nets.push_back(std::move(net));
  }
  return nets;
}

}  // namespace lcbench::nn
