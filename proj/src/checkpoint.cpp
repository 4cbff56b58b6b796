#include "toalab/checkpoint.hpp"

#include <fstream>
#include <vector>

#include "toalab/binary_io.hpp"
#include "toalab/errors.hpp"

namespace toalab {

namespace {

std::vector<std::vector<std::uint32_t>> tensor_shapes(const nn::network_params<float>& p) {
  auto conv = [](const nn::conv2d<float>& c) {
    return std::vector<std::vector<std::uint32_t>>{
        {static_cast<std::uint32_t>(c.out_channels), static_cast<std::uint32_t>(c.in_channels),
         static_cast<std::uint32_t>(c.kernel_h), static_cast<std::uint32_t>(c.kernel_w)},
        {static_cast<std::uint32_t>(c.out_channels)}};
  };
  auto fc = [](const nn::dense<float>& d) {
    return std::vector<std::vector<std::uint32_t>>{
        {static_cast<std::uint32_t>(d.out), static_cast<std::uint32_t>(d.in)}, {static_cast<std::uint32_t>(d.out)}};
  };
  std::vector<std::vector<std::uint32_t>> shapes;
  for (const auto& s : conv(p.conv1)) shapes.push_back(s);
  for (const auto& s : conv(p.conv2)) shapes.push_back(s);
  for (const auto& h : p.heads) {
    for (const auto* d : {&h.fc1, &h.fc2, &h.fc3}) {
      for (const auto& s : fc(*d)) shapes.push_back(s);
    }
  }
  return shapes;
}

} // namespace

void write_checkpoint(std::ostream& out, const nn::network_params<float>& params) {
  io::byte_writer w(out);
  w.magic("TOAP");
  w.u32(checkpoint_version);
  w.u32(static_cast<std::uint32_t>(params.window));
  w.u32(static_cast<std::uint32_t>(params.n_rb));
  const auto shapes = tensor_shapes(params);
  const auto tensors = params.tensors();
  for (std::size_t t = 0; t < tensors.size(); ++t) {
    w.u32(static_cast<std::uint32_t>(shapes[t].size()));
    for (auto d : shapes[t]) {
      w.u32(d);
    }
    for (float v : tensors[t]) {
      w.f32(v);
    }
  }
}

nn::network_params<float> read_checkpoint(std::istream& in) {
  io::byte_reader r(in);
  r.expect_magic("TOAP");
  const std::uint64_t version_at = r.position();
  const std::uint32_t version = r.u32();
  if (version != checkpoint_version) {
    throw format_error("unsupported checkpoint version " + std::to_string(version), version_at);
  }
  const std::uint64_t shape_at = r.position();
  const std::uint32_t window = r.u32();
  const std::uint32_t n_rb = r.u32();
  nn::network_params<float> params;
  try {
    params = nn::zero_network<float>(window, n_rb);
  } catch (const shape_error& e) {
    throw format_error(std::string("invalid network shape: ") + e.what(), shape_at);
  }
  const auto shapes = tensor_shapes(params);
  const auto tensors = params.tensors();
  for (std::size_t t = 0; t < tensors.size(); ++t) {
    const std::uint64_t at = r.position();
    const std::uint32_t rank = r.u32();
    std::vector<std::uint32_t> dims(rank > 8 ? 0 : rank);
    if (rank > 8) {
      throw format_error("tensor rank " + std::to_string(rank) + " too large", at);
    }
    for (auto& d : dims) {
      d = r.u32();
    }
    if (dims != shapes[t]) {
      throw format_error("tensor " + std::to_string(t) + " has an unexpected shape", at);
    }
    for (auto& v : tensors[t]) {
      v = r.f32();
    }
  }
  r.expect_end();
  return params;
}

void save_checkpoint(const std::filesystem::path& path, const nn::network_params<float>& params) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw error("cannot open " + path.string() + " for writing");
  }
  write_checkpoint(out, params);
}

nn::network_params<float> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw error("cannot open " + path.string());
  }
  return read_checkpoint(in);
}

} // namespace toalab
