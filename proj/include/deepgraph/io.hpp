#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "deepgraph/errors.hpp"
#include "deepgraph/graph.hpp"
#include "deepgraph/matrix.hpp"
#include "deepgraph/nn.hpp"
#include "deepgraph/ridge.hpp"

namespace deepgraph::io {

static_assert(std::endian::native == std::endian::little,
              "binary formats are little-endian; big-endian hosts are unsupported");

// %.{digits}g formatting; digits=17 round-trips doubles exactly.
inline std::string fmt(double v, int digits = 17) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
    return buf;
}

// Timestamps and labels are often integral; print them without an exponent.
inline std::string fmt_time(double v) {
    if (v == static_cast<double>(static_cast<long long>(v)) && std::abs(v) < 1e15) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%lld", static_cast<long long>(v));
        return buf;
    }
    return fmt(v);
}

inline std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + path.string());
    return out;
}

inline std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open for reading: " + path.string());
    return in;
}

// ---- temporal edge lists -------------------------------------------------
// One edge per line: `src dst timestamp`, separated by tabs or spaces;
// '#' starts a comment line.

inline void write_edge_list(const std::filesystem::path& path, const std::vector<TemporalEdge>& edges) {
    auto out = open_out(path);
    for (const auto& e : edges)
        out << e.src << '\t' << e.dst << '\t' << fmt_time(e.timestamp) << '\n';
}

inline std::vector<TemporalEdge> read_edge_list(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::vector<TemporalEdge> edges;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        char* cursor = line.data() + first;
        char* end = nullptr;
        errno = 0;
        const unsigned long long src = std::strtoull(cursor, &end, 10);
        if (end == cursor) throw DataError(path.string() + ":" + std::to_string(lineno) + ": bad src id");
        cursor = end;
        const unsigned long long dst = std::strtoull(cursor, &end, 10);
        if (end == cursor) throw DataError(path.string() + ":" + std::to_string(lineno) + ": bad dst id");
        cursor = end;
        const double ts = std::strtod(cursor, &end);
        if (end == cursor) throw DataError(path.string() + ":" + std::to_string(lineno) + ": bad timestamp");
        edges.push_back({src, dst, ts});
    }
    return edges;
}

// ---- descriptor / matrix text formats -------------------------------------

// N_B rows x N columns, comma separated, 9 significant digits.
inline void write_descriptor_csv(const std::filesystem::path& path, const Matrix& m) {
    auto out = open_out(path);
    for (std::size_t i = 0; i < m.rows; ++i) {
        for (std::size_t j = 0; j < m.cols; ++j) {
            if (j) out << ',';
            out << fmt(m(i, j), 9);
        }
        out << '\n';
    }
}

// ASCII portable graymap, linearly scaled so the matrix maximum maps to 255.
inline void write_pgm(const std::filesystem::path& path, const Matrix& m) {
    auto out = open_out(path);
    double max_v = 0.0;
    for (double v : m.data) max_v = std::max(max_v, v);
    out << "P2\n" << m.cols << ' ' << m.rows << "\n255\n";
    for (std::size_t i = 0; i < m.rows; ++i) {
        for (std::size_t j = 0; j < m.cols; ++j) {
            const int g = max_v > 0.0 ? static_cast<int>(m(i, j) / max_v * 255.0 + 0.5) : 0;
            if (j) out << ' ';
            out << g;
        }
        out << '\n';
    }
}

// ---- binary helpers --------------------------------------------------------

namespace detail {

template <typename T>
void put(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw DataError("unexpected end of binary file");
    return v;
}

inline void put_matrix(std::ostream& out, const Matrix& m) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(m.rows));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(m.cols));
    out.write(reinterpret_cast<const char*>(m.data.data()),
              static_cast<std::streamsize>(m.data.size() * sizeof(double)));
}

inline Matrix get_matrix(std::istream& in) {
    const auto rows = get<std::uint32_t>(in);
    const auto cols = get<std::uint32_t>(in);
    Matrix m(rows, cols);
    in.read(reinterpret_cast<char*>(m.data.data()),
            static_cast<std::streamsize>(m.data.size() * sizeof(double)));
    if (!in) throw DataError("unexpected end of binary file");
    return m;
}

inline void put_magic(std::ostream& out, const char (&magic)[9]) { out.write(magic, 8); }

inline void check_magic(std::istream& in, const char (&magic)[9], const std::string& what) {
    char buf[8];
    in.read(buf, 8);
    if (!in || std::string(buf, 8) != std::string(magic, 8))
        throw DataError(what + ": bad magic (wrong or corrupted file)");
}

}  // namespace detail

// ---- descriptor sets -------------------------------------------------------

// All descriptors of one split plus their labels, in origin order.
struct DescriptorSet {
    std::vector<std::uint64_t> origins;
    std::vector<double> raw_growth;
    std::vector<double> labels;  // scaled
    std::vector<Matrix> descriptors;

    std::size_t size() const { return origins.size(); }
};

inline void write_descriptor_set(const std::filesystem::path& path, const DescriptorSet& set) {
    auto out = open_out(path);
    detail::put_magic(out, "DGDESC01");
    detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(set.size()));
    for (std::size_t i = 0; i < set.size(); ++i) {
        detail::put<std::uint64_t>(out, set.origins[i]);
        detail::put<double>(out, set.raw_growth[i]);
        detail::put<double>(out, set.labels[i]);
        detail::put_matrix(out, set.descriptors[i]);
    }
}

inline DescriptorSet read_descriptor_set(const std::filesystem::path& path) {
    auto in = open_in(path);
    detail::check_magic(in, "DGDESC01", path.string());
    const auto count = detail::get<std::uint32_t>(in);
    DescriptorSet set;
    for (std::uint32_t i = 0; i < count; ++i) {
        set.origins.push_back(detail::get<std::uint64_t>(in));
        set.raw_growth.push_back(detail::get<double>(in));
        set.labels.push_back(detail::get<double>(in));
        set.descriptors.push_back(detail::get_matrix(in));
    }
    return set;
}

// ---- stats files -----------------------------------------------------------
// Text files carrying the split they were fitted on; the training pipeline
// refuses stats whose provenance is not the training split.

inline void write_stats_csv(const std::filesystem::path& path, const std::string& fitted_on,
                            const std::vector<std::pair<std::string, const Matrix*>>& blocks) {
    auto out = open_out(path);
    out << "# fitted_on=" << fitted_on << '\n';
    for (const auto& [name, m] : blocks) {
        out << "# block=" << name << " rows=" << m->rows << " cols=" << m->cols << '\n';
        for (std::size_t i = 0; i < m->rows; ++i) {
            for (std::size_t j = 0; j < m->cols; ++j) {
                if (j) out << ',';
                out << fmt((*m)(i, j));
            }
            out << '\n';
        }
    }
}

struct StatsFile {
    std::string fitted_on;
    std::vector<std::pair<std::string, Matrix>> blocks;

    const Matrix& block(const std::string& name) const {
        for (const auto& [n, m] : blocks)
            if (n == name) return m;
        throw DataError("stats file: missing block '" + name + "'");
    }
};

inline StatsFile read_stats_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    StatsFile file;
    std::string line;
    Matrix* current = nullptr;
    std::size_t expect_rows = 0;
    while (std::getline(in, line)) {
        if (line.rfind("# fitted_on=", 0) == 0) {
            file.fitted_on = line.substr(12);
            continue;
        }
        if (line.rfind("# block=", 0) == 0) {
            std::string rest = line.substr(8);
            const auto sp1 = rest.find(' ');
            const std::string name = rest.substr(0, sp1);
            std::size_t rows = 0, cols = 0;
            std::sscanf(rest.c_str() + sp1, " rows=%zu cols=%zu", &rows, &cols);
            file.blocks.emplace_back(name, Matrix(rows, cols));
            current = &file.blocks.back().second;
            expect_rows = 0;
            continue;
        }
        if (line.empty()) continue;
        if (!current || expect_rows >= current->rows) throw DataError(path.string() + ": malformed stats file");
        const char* cursor = line.c_str();
        for (std::size_t j = 0; j < current->cols; ++j) {
            char* end = nullptr;
            (*current)(expect_rows, j) = std::strtod(cursor, &end);
            if (end == cursor) throw DataError(path.string() + ": bad number in stats file");
            cursor = (*end == ',') ? end + 1 : end;
        }
        ++expect_rows;
    }
    return file;
}

// ---- model checkpoints -----------------------------------------------------
// Versioned header (magic, format version, architecture), then every
// parameter tensor in declared order as little-endian doubles. The flatten
// order of conv feature maps is recorded in the header ('R' = row-major).

constexpr std::uint32_t kCheckpointVersion = 1;

inline void write_nn_checkpoint(const std::filesystem::path& path, const nn::Model& model) {
    auto out = open_out(path);
    detail::put_magic(out, "DGCKPT01");
    detail::put<std::uint32_t>(out, kCheckpointVersion);
    detail::put<std::uint8_t>(out, 0);  // class: neural net
    const auto& cfg = model.cfg;
    detail::put<std::uint8_t>(out, static_cast<std::uint8_t>(cfg.kind));
    detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(cfg.bins));
    detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(cfg.steps));
    detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(cfg.filter_sizes.size()));
    for (std::size_t m : cfg.filter_sizes) detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(m));
    detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(cfg.filters1));
    detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(cfg.filters2));
    detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(cfg.dense_size));
    detail::put<double>(out, cfg.dropout1);
    detail::put<double>(out, cfg.dropout2);
    detail::put<std::uint8_t>(out, 'R');  // flatten order
    const auto params = model.params();
    detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(params.size()));
    for (const Matrix* p : params) detail::put_matrix(out, *p);
}

inline std::uint8_t peek_checkpoint_class(const std::filesystem::path& path) {
    auto in = open_in(path);
    detail::check_magic(in, "DGCKPT01", path.string());
    const auto version = detail::get<std::uint32_t>(in);
    if (version != kCheckpointVersion)
        throw DataError(path.string() + ": unsupported checkpoint version " + std::to_string(version));
    return detail::get<std::uint8_t>(in);
}

inline nn::Model read_nn_checkpoint(const std::filesystem::path& path) {
    auto in = open_in(path);
    detail::check_magic(in, "DGCKPT01", path.string());
    if (detail::get<std::uint32_t>(in) != kCheckpointVersion)
        throw DataError(path.string() + ": unsupported checkpoint version");
    if (detail::get<std::uint8_t>(in) != 0)
        throw DataError(path.string() + ": not a neural-net checkpoint");
    nn::ModelConfig cfg;
    cfg.kind = static_cast<nn::ModelKind>(detail::get<std::uint8_t>(in));
    cfg.bins = detail::get<std::uint32_t>(in);
    cfg.steps = detail::get<std::uint32_t>(in);
    const auto n_sizes = detail::get<std::uint32_t>(in);
    cfg.filter_sizes.clear();
    for (std::uint32_t i = 0; i < n_sizes; ++i) cfg.filter_sizes.push_back(detail::get<std::uint32_t>(in));
    cfg.filters1 = detail::get<std::uint32_t>(in);
    cfg.filters2 = detail::get<std::uint32_t>(in);
    cfg.dense_size = detail::get<std::uint32_t>(in);
    cfg.dropout1 = detail::get<double>(in);
    cfg.dropout2 = detail::get<double>(in);
    if (detail::get<std::uint8_t>(in) != 'R')
        throw DataError(path.string() + ": unsupported flatten order");
    Rng dummy(0);
    nn::Model model = nn::build_model(cfg, dummy);
    const auto n_tensors = detail::get<std::uint32_t>(in);
    auto params = model.params();
    if (n_tensors != params.size()) throw DataError(path.string() + ": tensor count mismatch");
    for (Matrix* p : params) {
        Matrix loaded = detail::get_matrix(in);
        if (!loaded.same_shape(*p)) throw DataError(path.string() + ": tensor shape mismatch");
        *p = std::move(loaded);
    }
    return model;
}

enum class RidgeInput : std::uint8_t { kDescriptor = 0, kFeatures = 1 };

inline void write_ridge_checkpoint(const std::filesystem::path& path, const RidgeModel& model,
                                   RidgeInput input) {
    auto out = open_out(path);
    detail::put_magic(out, "DGCKPT01");
    detail::put<std::uint32_t>(out, kCheckpointVersion);
    detail::put<std::uint8_t>(out, 1);  // class: ridge
    detail::put<std::uint8_t>(out, static_cast<std::uint8_t>(input));
    detail::put<double>(out, model.l2);
    detail::put<double>(out, model.intercept);
    detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(model.n_features()));
    const auto put_vec = [&out](const std::vector<double>& v) {
        out.write(reinterpret_cast<const char*>(v.data()),
                  static_cast<std::streamsize>(v.size() * sizeof(double)));
    };
    put_vec(model.weights);
    put_vec(model.feature_means);
    put_vec(model.feature_sds);
}

inline RidgeModel read_ridge_checkpoint(const std::filesystem::path& path, RidgeInput* input = nullptr) {
    auto in = open_in(path);
    detail::check_magic(in, "DGCKPT01", path.string());
    if (detail::get<std::uint32_t>(in) != kCheckpointVersion)
        throw DataError(path.string() + ": unsupported checkpoint version");
    if (detail::get<std::uint8_t>(in) != 1)
        throw DataError(path.string() + ": not a ridge checkpoint");
    const auto in_kind = static_cast<RidgeInput>(detail::get<std::uint8_t>(in));
    if (input) *input = in_kind;
    RidgeModel model;
    model.l2 = detail::get<double>(in);
    model.intercept = detail::get<double>(in);
    const auto p = detail::get<std::uint32_t>(in);
    const auto get_vec = [&in, p]() {
        std::vector<double> v(p);
        in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(p * sizeof(double)));
        if (!in) throw DataError("unexpected end of ridge checkpoint");
        return v;
    };
    model.weights = get_vec();
    model.feature_means = get_vec();
    model.feature_sds = get_vec();
    return model;
}

}  // namespace deepgraph::io
