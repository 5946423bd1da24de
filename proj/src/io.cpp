#include "manifex/io.hpp"

#include "manifex/errors.hpp"

#include <zlib.h>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

namespace manifex {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open for writing: " + path.string());
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open for reading: " + path.string());
    return in;
}

// Byte-level writer that keeps a running crc32 of everything emitted.
class ChecksumWriter {
public:
    explicit ChecksumWriter(std::ofstream& out) : out_(out) {}

    void bytes(const void* data, std::size_t n) {
        crc_ = crc32(crc_, static_cast<const Bytef*>(data), static_cast<uInt>(n));
        out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
    }
    void u32(std::uint32_t v) { bytes(&v, sizeof(v)); }
    void u64(std::uint64_t v) { bytes(&v, sizeof(v)); }
    void f64(double v) { bytes(&v, sizeof(v)); }
    void matrix(const Eigen::MatrixXd& m) {
        u64(static_cast<std::uint64_t>(m.rows()));
        u64(static_cast<std::uint64_t>(m.cols()));
        if (m.size() > 0) bytes(m.data(), sizeof(double) * static_cast<std::size_t>(m.size()));
    }
    std::uint32_t crc() const { return static_cast<std::uint32_t>(crc_); }

private:
    std::ofstream& out_;
    uLong crc_ = crc32(0L, nullptr, 0);
};

class ChecksumReader {
public:
    ChecksumReader(std::ifstream& in, const std::filesystem::path& path)
        : in_(in), path_(path) {}

    void bytes(void* data, std::size_t n) {
        in_.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in_.gcount()) != n)
            throw io_error("truncated file: " + path_.string());
        crc_ = crc32(crc_, static_cast<const Bytef*>(data), static_cast<uInt>(n));
    }
    std::uint32_t u32() { std::uint32_t v; bytes(&v, sizeof(v)); return v; }
    std::uint64_t u64() { std::uint64_t v; bytes(&v, sizeof(v)); return v; }
    double f64() { double v; bytes(&v, sizeof(v)); return v; }
    Eigen::MatrixXd matrix() {
        const std::uint64_t rows = u64(), cols = u64();
        if (rows > (1u << 30) || cols > (1u << 30))
            throw io_error("implausible matrix shape in " + path_.string());
        Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        if (m.size() > 0) bytes(m.data(), sizeof(double) * static_cast<std::size_t>(m.size()));
        return m;
    }
    std::uint32_t crc() const { return static_cast<std::uint32_t>(crc_); }

private:
    std::ifstream& in_;
    std::filesystem::path path_;
    uLong crc_ = crc32(0L, nullptr, 0);
};

constexpr char kModelMagic[4] = {'M', 'F', 'X', 'M'};
constexpr std::uint32_t kModelVersion = 1;
constexpr char kMatrixMagic[4] = {'M', 'X', 'F', '1'};

} // namespace

void write_pgm16(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
    if (m.size() == 0) throw std::invalid_argument("write_pgm16: empty matrix");
    if (!m.allFinite()) throw std::invalid_argument("write_pgm16: non-finite values");
    const double lo = m.minCoeff(), hi = m.maxCoeff();
    const double span = hi - lo;
    auto out = open_out(path);
    out << "P5\n" << m.cols() << " " << m.rows() << "\n65535\n";
    std::vector<unsigned char> row(static_cast<std::size_t>(m.cols()) * 2);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            const double unit = span > 0.0 ? (m(r, c) - lo) / span : 0.0;
            const auto v = static_cast<std::uint16_t>(std::lround(unit * 65535.0));
            row[static_cast<std::size_t>(c) * 2] = static_cast<unsigned char>(v >> 8);
            row[static_cast<std::size_t>(c) * 2 + 1] = static_cast<unsigned char>(v & 0xff);
        }
        out.write(reinterpret_cast<const char*>(row.data()),
                  static_cast<std::streamsize>(row.size()));
    }
    if (!out) throw io_error("write failed: " + path.string());

    auto sidecar = open_out(path.string() + ".scale.txt");
    sidecar << "min " << fmt_double(lo) << "\nmax " << fmt_double(hi) << "\n";
    if (!sidecar) throw io_error("write failed: " + path.string() + ".scale.txt");
}

Eigen::MatrixXd read_pgm16(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::string magic;
    long cols = 0, rows = 0, maxval = 0;
    in >> magic >> cols >> rows >> maxval;
    if (!in || magic != "P5")
        throw io_error("not a binary PGM file: " + path.string());
    if (maxval != 65535)
        throw io_error("expected a 16-bit PGM (maxval 65535): " + path.string());
    if (cols < 1 || rows < 1)
        throw io_error("implausible PGM shape in " + path.string());
    in.ignore(1); // single whitespace byte before the samples

    double lo = 0.0, hi = 1.0;
    std::ifstream sidecar(path.string() + ".scale.txt");
    if (sidecar) {
        std::string word;
        sidecar >> word >> lo >> word >> hi;
        if (!sidecar) throw io_error("bad scale sidecar: " + path.string() + ".scale.txt");
    }

    Eigen::MatrixXd m(rows, cols);
    std::vector<unsigned char> row(static_cast<std::size_t>(cols) * 2);
    for (long r = 0; r < rows; ++r) {
        in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size()));
        if (static_cast<std::size_t>(in.gcount()) != row.size())
            throw io_error("truncated file: " + path.string());
        for (long c = 0; c < cols; ++c) {
            const auto v = static_cast<std::uint16_t>(
                (row[static_cast<std::size_t>(c) * 2] << 8) |
                row[static_cast<std::size_t>(c) * 2 + 1]);
            m(r, c) = lo + (hi - lo) * (static_cast<double>(v) / 65535.0);
        }
    }
    return m;
}

void write_mxf(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
    auto out = open_out(path);
    out.write(kMatrixMagic, 4);
    const std::uint32_t rows = static_cast<std::uint32_t>(m.rows());
    const std::uint32_t cols = static_cast<std::uint32_t>(m.cols());
    const std::uint32_t reserved = 0;
    out.write(reinterpret_cast<const char*>(&rows), 4);
    out.write(reinterpret_cast<const char*>(&cols), 4);
    out.write(reinterpret_cast<const char*>(&reserved), 4);
    // Row-major payload.
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) row[static_cast<std::size_t>(c)] = m(r, c);
        out.write(reinterpret_cast<const char*>(row.data()),
                  static_cast<std::streamsize>(row.size() * sizeof(double)));
    }
    if (!out) throw io_error("write failed: " + path.string());
}

Eigen::MatrixXd read_mxf(const std::filesystem::path& path) {
    auto in = open_in(path);
    char magic[4];
    std::uint32_t rows = 0, cols = 0, reserved = 0;
    in.read(magic, 4);
    in.read(reinterpret_cast<char*>(&rows), 4);
    in.read(reinterpret_cast<char*>(&cols), 4);
    in.read(reinterpret_cast<char*>(&reserved), 4);
    if (!in) throw io_error("truncated header: " + path.string());
    if (std::memcmp(magic, kMatrixMagic, 4) != 0)
        throw io_error("not a MXF1 matrix file: " + path.string());
    Eigen::MatrixXd m(rows, cols);
    std::vector<double> row(cols);
    for (std::uint32_t r = 0; r < rows; ++r) {
        in.read(reinterpret_cast<char*>(row.data()),
                static_cast<std::streamsize>(row.size() * sizeof(double)));
        if (static_cast<std::size_t>(in.gcount()) != row.size() * sizeof(double))
            throw io_error("truncated file: " + path.string());
        for (std::uint32_t c = 0; c < cols; ++c) m(r, c) = row[c];
    }
    return m;
}

void write_angles(const std::filesystem::path& path, const std::vector<double>& angles) {
    auto out = open_out(path);
    for (double a : angles) out << fmt_double(a) << "\n";
    if (!out) throw io_error("write failed: " + path.string());
}

std::vector<double> read_angles(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::vector<double> angles;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        try {
            angles.push_back(std::stod(line));
        } catch (const std::exception&) {
            throw io_error("bad angle '" + line + "' in " + path.string());
        }
    }
    return angles;
}

void write_reports_csv(const std::filesystem::path& path,
                       const std::vector<ErrorReport>& reports) {
    auto out = open_out(path);
    out << "method,batch,error,runtime_s\n";
    for (const ErrorReport& r : reports) {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%s,%d,%.12g,%.3f\n", r.method.c_str(), r.batch,
                      r.error, r.runtime_s);
        out << buf;
    }
    if (!out) throw io_error("write failed: " + path.string());
}

void save_model(const std::filesystem::path& path, const ExtenderModel& model,
                const EvaluationCache* cache) {
    auto out = open_out(path);
    ChecksumWriter w(out);
    w.bytes(kModelMagic, 4);
    w.u32(kModelVersion);
    w.u32(cache ? 1u : 0u);
    w.u64(static_cast<std::uint64_t>(model.ambient_dim()));
    w.u64(static_cast<std::uint64_t>(model.target_dim()));
    w.u64(static_cast<std::uint64_t>(model.sample_count()));
    w.u64(static_cast<std::uint64_t>(model.value_dim()));
    w.f64(model.delta);
    w.f64(model.half_width);
    w.matrix(model.basis.right_vectors);
    w.matrix(model.basis.singular_values);
    w.matrix(model.train_points.points);
    w.matrix(model.train_coords);
    w.matrix(model.values.values);
    if (cache) {
        const auto ids = cache->ids();
        w.u64(ids.size());
        for (std::uint64_t id : ids) {
            const CacheEntry& e = cache->at(id);
            w.u64(id);
            w.u32(e.exact_hit ? 1u : 0u);
            w.u64(static_cast<std::uint64_t>(e.k_seen));
            w.f64(e.epsilon);
            w.f64(e.nm);
            w.matrix(e.query_coord);
            w.matrix(e.weighted_sum);
        }
    }
    const std::uint32_t crc = w.crc();
    out.write(reinterpret_cast<const char*>(&crc), 4);
    if (!out) throw io_error("write failed: " + path.string());
}

ExtenderModel load_model(const std::filesystem::path& path, EvaluationCache* cache) {
    auto in = open_in(path);
    ChecksumReader r(in, path);
    char magic[4];
    r.bytes(magic, 4);
    if (std::memcmp(magic, kModelMagic, 4) != 0)
        throw io_error("not a model file (bad magic): " + path.string());
    const std::uint32_t version = r.u32();
    if (version != kModelVersion)
        throw io_error("unsupported model format version " + std::to_string(version) + " in " +
                       path.string());
    const std::uint32_t has_cache = r.u32();

    ExtenderModel model;
    const std::uint64_t n = r.u64();
    const std::uint64_t n_bar = r.u64();
    const std::uint64_t k = r.u64();
    const std::uint64_t p = r.u64();
    model.delta = r.f64();
    model.half_width = r.f64();
    model.basis.right_vectors = r.matrix();
    Eigen::MatrixXd spectrum = r.matrix();
    model.basis.singular_values = spectrum.col(0);
    model.train_points.points = r.matrix();
    model.train_coords = r.matrix();
    model.values.values = r.matrix();

    EvaluationCache loaded;
    if (has_cache) {
        const std::uint64_t count = r.u64();
        for (std::uint64_t i = 0; i < count; ++i) {
            const std::uint64_t id = r.u64();
            CacheEntry e;
            e.exact_hit = r.u32() != 0;
            e.k_seen = static_cast<Eigen::Index>(r.u64());
            e.epsilon = r.f64();
            e.nm = r.f64();
            e.query_coord = r.matrix().col(0);
            e.weighted_sum = r.matrix().col(0);
            loaded.put(id, std::move(e));
        }
    }

    const std::uint32_t expected = r.crc();
    std::uint32_t stored = 0;
    in.read(reinterpret_cast<char*>(&stored), 4);
    if (in.gcount() != 4) throw io_error("truncated file: " + path.string());
    if (stored != expected) throw io_error("checksum mismatch in " + path.string());

    if (model.basis.right_vectors.rows() != static_cast<Eigen::Index>(n) ||
        model.basis.right_vectors.cols() != static_cast<Eigen::Index>(n_bar) ||
        model.train_points.points.rows() != static_cast<Eigen::Index>(k) ||
        model.values.values.cols() != static_cast<Eigen::Index>(p))
        throw io_error("inconsistent dimensions in " + path.string());

    if (cache && has_cache) {
        for (std::uint64_t id : loaded.ids()) cache->put(id, loaded.at(id));
    }
    return model;
}

} // namespace manifex
