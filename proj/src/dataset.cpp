#include "toalab/dataset.hpp"

#include <fstream>

#include "toalab/binary_io.hpp"
#include "toalab/errors.hpp"

namespace toalab {

void write_dataset(std::ostream& out, const dataset& ds) {
  const std::size_t plane_count = static_cast<std::size_t>(ds.window) * (1 + ds.n_rb) * 2;
  io::byte_writer w(out);
  w.magic("TOAD");
  w.u32(dataset_version);
  w.u64(ds.records.size());
  w.u32(ds.window);
  w.u32(ds.n_rb);
  for (const auto& r : ds.records) {
    if (r.planes.size() != plane_count) {
      throw shape_error("record planes do not match the dataset shape");
    }
    for (float v : r.planes) {
      w.f32(v);
    }
    w.f32(r.toa_true_ns);
    w.i32(r.anchor);
    w.u8(static_cast<std::uint8_t>(r.which));
    w.f32(r.snr_db);
  }
}

dataset read_dataset(std::istream& in) {
  io::byte_reader r(in);
  r.expect_magic("TOAD");
  const std::uint64_t version_at = r.position();
  const std::uint32_t version = r.u32();
  if (version != dataset_version) {
    throw format_error("unsupported dataset version " + std::to_string(version), version_at);
  }
  const std::uint64_t count = r.u64();
  dataset ds;
  ds.window = r.u32();
  ds.n_rb = r.u32();
  if (ds.window == 0 || ds.n_rb == 0 || ds.window > 4096 || ds.n_rb > 512) {
    throw format_error("implausible dataset shape", r.position());
  }
  const std::size_t plane_count = static_cast<std::size_t>(ds.window) * (1 + ds.n_rb) * 2;
  ds.records.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(count, 1U << 20)));
  for (std::uint64_t i = 0; i < count; ++i) {
    dataset_record rec;
    rec.planes.resize(plane_count);
    for (auto& v : rec.planes) {
      v = r.f32();
    }
    rec.toa_true_ns = r.f32();
    rec.anchor = r.i32();
    const std::uint64_t case_at = r.position();
    const std::uint8_t c = r.u8();
    if (c >= n_channel_cases) {
      throw format_error("invalid channel case " + std::to_string(c), case_at);
    }
    rec.which = static_cast<channel_case>(c);
    rec.snr_db = r.f32();
    ds.records.push_back(std::move(rec));
  }
  r.expect_end();
  return ds;
}

void save_dataset(const std::filesystem::path& path, const dataset& ds) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw error("cannot open " + path.string() + " for writing");
  }
  write_dataset(out, ds);
}

dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw error("cannot open " + path.string());
  }
  return read_dataset(in);
}

std::vector<nn::example<float>> to_examples(const dataset& ds, double sample_period) {
  std::vector<nn::example<float>> out;
  out.reserve(ds.records.size());
  for (const auto& r : ds.records) {
    const double target = static_cast<double>(r.toa_true_ns) - static_cast<double>(r.anchor) * sample_period * 1e9;
    out.push_back({r.planes, static_cast<float>(target), r.which});
  }
  return out;
}

} // namespace toalab
