#include "abq/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace abq {

namespace {

constexpr char kMagic[4] = {'A', 'B', 'Q', '2'};

template <class T>
void put(std::vector<unsigned char>& buf, T v) {
  static_assert(std::endian::native == std::endian::little ||
                std::endian::native == std::endian::big);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
  }
  buf.insert(buf.end(), bytes, bytes + sizeof(T));
}

class Reader {
 public:
  Reader(std::vector<unsigned char> data, std::string path)
      : data_(std::move(data)), path_(std::move(path)) {}

  template <class T>
  T get() {
    if (pos_ + sizeof(T) > data_.size()) {
      throw std::runtime_error("checkpoint '" + path_ + "' is truncated");
    }
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, data_.data() + pos_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) {
      for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
    }
    pos_ += sizeof(T);
    T v;
    std::memcpy(&v, bytes, sizeof(T));
    return v;
  }

  bool done() const { return pos_ == data_.size(); }

 private:
  std::vector<unsigned char> data_;
  std::string path_;
  std::size_t pos_ = 0;
};

}  // namespace

void write_checkpoint(const std::string& path, const State& state, const Params& params) {
  const Grid& g = state.grid();
  std::vector<unsigned char> buf(kMagic, kMagic + 4);
  put<std::uint32_t>(buf, kCheckpointVersion);
  put<std::uint32_t>(buf, static_cast<std::uint32_t>(g.nx()));
  put<std::uint32_t>(buf, static_cast<std::uint32_t>(g.ny()));
  put<double>(buf, g.ly());
  put<double>(buf, state.t);
  put<double>(buf, params.nu);
  put<double>(buf, params.eta);
  put<double>(buf, params.g0);
  for (const SpectralField* f : {&state.u1, &state.u2, &state.theta}) {
    for (const Complex& c : f->coeffs()) {
      put<double>(buf, c.real());
      put<double>(buf, c.imag());
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write checkpoint '" + path + "'");
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw std::runtime_error("failed writing checkpoint '" + path + "'");
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint '" + path + "'");
  std::vector<unsigned char> data((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (data.size() < 4 || std::memcmp(data.data(), kMagic, 4) != 0) {
    throw std::runtime_error("'" + path + "' is not a checkpoint (bad magic)");
  }
  data.erase(data.begin(), data.begin() + 4);
  Reader r(std::move(data), path);
  const auto version = r.get<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw std::runtime_error("checkpoint '" + path + "' has unsupported version " +
                             std::to_string(version));
  }
  const auto nx = r.get<std::uint32_t>();
  const auto ny = r.get<std::uint32_t>();
  const double ly = r.get<double>();
  const double t = r.get<double>();
  Params params;
  params.nu = r.get<double>();
  params.eta = r.get<double>();
  params.g0 = r.get<double>();
  const Grid grid(static_cast<int>(nx), static_cast<int>(ny), ly);
  State state(grid);
  state.t = t;
  for (SpectralField* f : {&state.u1, &state.u2, &state.theta}) {
    for (Complex& c : f->coeffs()) {
      const double re = r.get<double>();
      const double im = r.get<double>();
      c = Complex(re, im);
    }
  }
  if (!r.done()) throw std::runtime_error("checkpoint '" + path + "' has trailing data");
  return {std::move(state), params};
}

}  // namespace abq
