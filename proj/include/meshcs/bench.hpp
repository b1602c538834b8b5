#pragma once

#include <algorithm>
#include <atomic>
#include <bit>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <thread>
#include <vector>

#include <json.hpp>

#include "meshcs/ama.hpp"
#include "meshcs/cs.hpp"
#include "meshcs/error.hpp"
#include "meshcs/image.hpp"
#include "meshcs/mesh.hpp"
#include "meshcs/metrics.hpp"
#include "meshcs/random.hpp"

namespace meshcs {

enum class Method { tveq, ista, ama };

inline std::string to_string(Method m) {
    switch (m) {
        case Method::tveq: return "tveq";
        case Method::ista: return "ista";
        default: return "ama";
    }
}

inline Method method_from_string(const std::string& s) {
    if (s == "tveq") return Method::tveq;
    if (s == "ista") return Method::ista;
    if (s == "ama") return Method::ama;
    throw ValidationError("unknown method '" + s + "'");
}

/// One benchmark sweep: every (image, method, density) cell is run once.
/// `ama.sample_density` and `ama.seed` are overwritten per cell.
struct ExperimentSpec {
    std::vector<std::string> images;
    std::vector<double> densities{0.03, 0.10};
    std::vector<Method> methods{Method::tveq, Method::ista, Method::ama};
    std::uint64_t seed = 0;
    std::string output_dir;  // empty: compute the report only
    SensingDomain sensing_domain = SensingDomain::fourier;
    SamplingScheme sampling_scheme = SamplingScheme::variable_density;
    SolverConfig ista = SolverConfig::ista_defaults();
    SolverConfig tveq = SolverConfig::tveq_defaults();
    AmaConfig ama;

    void validate() const {
        if (images.empty()) throw ValidationError("experiment needs at least one image");
        if (methods.empty()) throw ValidationError("experiment needs at least one method");
        if (densities.empty()) throw ValidationError("experiment needs at least one density");
        for (double d : densities)
            if (!(d > 0 && d <= 1)) throw ValidationError("densities must lie in (0, 1]");
        auto has_duplicates = [](auto v) {
            std::sort(v.begin(), v.end());
            return std::adjacent_find(v.begin(), v.end()) != v.end();
        };
        std::vector<std::string> names;
        for (const auto& p : images) names.push_back(std::filesystem::path(p).stem().string());
        if (has_duplicates(names)) throw ValidationError("image names (file stems) must be distinct");
        if (has_duplicates(densities)) throw ValidationError("densities must be distinct");
        if (has_duplicates(methods)) throw ValidationError("methods must be distinct");
        ista.validate();
        tveq.validate();
        AmaConfig a = ama;
        a.sample_density = densities.front();
        a.validate();
    }
};

/// Display name of an image path: the file stem.
inline std::string image_name(const std::string& path) { return std::filesystem::path(path).stem().string(); }

// ---------------------------------------------------------------- JSON config

namespace detail {

template <class F>
void for_each_key(const nlohmann::json& j, const std::string& where, F&& f) {
    if (!j.is_object()) throw ValidationError(where + " must be an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!f(it.key(), it.value())) throw ValidationError("unknown key '" + it.key() + "' in " + where);
}

template <class T>
T get_as(const nlohmann::json& v, const std::string& key) {
    try {
        return v.get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ValidationError("bad value for '" + key + "'");
    }
}

}  // namespace detail

inline nlohmann::json to_json(const SolverConfig& c) {
    return {{"max_iterations", c.max_iterations},
            {"tolerance", c.tolerance},
            {"threshold_fraction", c.threshold_fraction},
            {"continuation_interval", c.continuation_interval},
            {"continuation_factor", c.continuation_factor},
            {"tv_primal_step", c.tv_primal_step}};
}

inline void apply_json(SolverConfig& c, const nlohmann::json& j, const std::string& where) {
    detail::for_each_key(j, where, [&](const std::string& k, const nlohmann::json& v) {
        if (k == "max_iterations") c.max_iterations = detail::get_as<int>(v, k);
        else if (k == "tolerance") c.tolerance = detail::get_as<double>(v, k);
        else if (k == "threshold_fraction") c.threshold_fraction = detail::get_as<double>(v, k);
        else if (k == "continuation_interval") c.continuation_interval = detail::get_as<int>(v, k);
        else if (k == "continuation_factor") c.continuation_factor = detail::get_as<double>(v, k);
        else if (k == "tv_primal_step") c.tv_primal_step = detail::get_as<double>(v, k);
        else return false;
        return true;
    });
}

inline nlohmann::json to_json(const AmaConfig& c) {
    return {{"outer_iterations", c.outer_iterations},
            {"smoothing_passes", c.smoothing_passes},
            {"hessian_regularization", c.hessian_regularization},
            {"anisotropy_cap", c.anisotropy_cap},
            {"hessian_source", to_string(c.hessian_source)},
            {"fit_radius", c.fit_radius},
            {"flip_sweeps", c.flip_sweeps}};
}

inline void apply_json(AmaConfig& c, const nlohmann::json& j, const std::string& where) {
    detail::for_each_key(j, where, [&](const std::string& k, const nlohmann::json& v) {
        if (k == "outer_iterations") c.outer_iterations = detail::get_as<int>(v, k);
        else if (k == "smoothing_passes") c.smoothing_passes = detail::get_as<int>(v, k);
        else if (k == "hessian_regularization") c.hessian_regularization = detail::get_as<double>(v, k);
        else if (k == "anisotropy_cap") c.anisotropy_cap = detail::get_as<double>(v, k);
        else if (k == "hessian_source") c.hessian_source = hessian_source_from_string(detail::get_as<std::string>(v, k));
        else if (k == "fit_radius") c.fit_radius = detail::get_as<double>(v, k);
        else if (k == "flip_sweeps") c.flip_sweeps = detail::get_as<int>(v, k);
        else return false;
        return true;
    });
}

inline nlohmann::json to_json(const ExperimentSpec& s) {
    nlohmann::json methods = nlohmann::json::array();
    for (Method m : s.methods) methods.push_back(to_string(m));
    return {{"images", s.images},
            {"densities", s.densities},
            {"methods", methods},
            {"seed", s.seed},
            {"output_dir", s.output_dir},
            {"sensing_domain", to_string(s.sensing_domain)},
            {"sampling_scheme", to_string(s.sampling_scheme)},
            {"ista", to_json(s.ista)},
            {"tveq", to_json(s.tveq)},
            {"ama", to_json(s.ama)}};
}

/// Parses a spec; relative image paths and output_dir are resolved against
/// `base_dir` when it is non-empty. Missing keys keep their defaults.
inline ExperimentSpec spec_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {}) {
    ExperimentSpec s;
    auto resolve = [&](const std::string& p) {
        const std::filesystem::path path(p);
        return (base_dir.empty() || path.is_absolute() ? path : base_dir / path).lexically_normal().string();
    };
    detail::for_each_key(j, "experiment", [&](const std::string& k, const nlohmann::json& v) {
        if (k == "images") {
            s.images.clear();
            for (const auto& p : detail::get_as<std::vector<std::string>>(v, k)) s.images.push_back(resolve(p));
        } else if (k == "densities") {
            s.densities = detail::get_as<std::vector<double>>(v, k);
        } else if (k == "methods") {
            s.methods.clear();
            for (const auto& m : detail::get_as<std::vector<std::string>>(v, k)) s.methods.push_back(method_from_string(m));
        } else if (k == "seed") {
            s.seed = detail::get_as<std::uint64_t>(v, k);
        } else if (k == "output_dir") {
            const auto d = detail::get_as<std::string>(v, k);
            s.output_dir = d.empty() ? d : resolve(d);
        } else if (k == "sensing_domain") {
            s.sensing_domain = sensing_domain_from_string(detail::get_as<std::string>(v, k));
        } else if (k == "sampling_scheme") {
            s.sampling_scheme = sampling_scheme_from_string(detail::get_as<std::string>(v, k));
        } else if (k == "ista") {
            apply_json(s.ista, v, "ista");
        } else if (k == "tveq") {
            apply_json(s.tveq, v, "tveq");
        } else if (k == "ama") {
            apply_json(s.ama, v, "ama");
        } else {
            return false;
        }
        return true;
    });
    s.validate();
    return s;
}

inline ExperimentSpec load_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(path + ": " + e.what());
    }
    return spec_from_json(j, std::filesystem::path(path).parent_path());
}

// ---------------------------------------------------------------- report

struct ReportRow {
    std::string image;
    std::size_t width = 0, height = 0;
    Method method = Method::tveq;
    double density = 0;
    double psnr_db = std::nan("");  // kPsnrExact for identical images, NaN on failure
    double ssim = std::nan("");
    int iterations = 0;
    bool converged = false;
    std::uint64_t seed = 0;
    std::string error;        // empty when the cell succeeded
    double wall_time_s = 0;   // excluded from determinism comparisons

    bool failed() const { return !error.empty(); }
    std::string resolution() const { return std::to_string(width) + "x" + std::to_string(height); }
};

namespace detail {
inline bool same_real(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }
}  // namespace detail

inline bool operator==(const ReportRow& a, const ReportRow& b) {
    return a.image == b.image && a.width == b.width && a.height == b.height && a.method == b.method &&
           a.density == b.density && detail::same_real(a.psnr_db, b.psnr_db) && detail::same_real(a.ssim, b.ssim) &&
           a.iterations == b.iterations && a.converged == b.converged && a.seed == b.seed && a.error == b.error &&
           a.wall_time_s == b.wall_time_s;
}

struct QualityReport {
    std::vector<ReportRow> rows;
    bool has_failures() const {
        return std::any_of(rows.begin(), rows.end(), [](const ReportRow& r) { return r.failed(); });
    }
    friend bool operator==(const QualityReport&, const QualityReport&) = default;
};

/// Deterministic per-cell seed from the master seed and the cell identity.
inline std::uint64_t cell_seed(std::uint64_t master, const std::string& image, Method method, double density) {
    return StableHash{}
        .add(master)
        .add(image)
        .add(to_string(method))
        .add(std::bit_cast<std::uint64_t>(density))
        .value();
}

// ---------------------------------------------------------------- rendering

/// White canvas with every mesh edge drawn as a 1-pixel black Bresenham line
/// between the rounded endpoint positions.
inline GrayImage render_wireframe(const TriMesh& mesh, std::size_t width, std::size_t height) {
    if (width == 0 || height == 0) throw ValidationError("wireframe needs a non-empty canvas");
    std::vector<double> px(width * height, 255.0);
    const auto W = static_cast<long>(width), H = static_cast<long>(height);
    auto plot = [&](long x, long y) {
        if (x >= 0 && y >= 0 && x < W && y < H) px[static_cast<std::size_t>(y * W + x)] = 0.0;
    };
    std::set<std::pair<int, int>> edges;
    for (const auto& t : mesh.triangles)
        for (int i = 0; i < 3; ++i) edges.insert(std::minmax(t[i], t[(i + 1) % 3]));
    for (const auto& [a, b] : edges) {
        const Point2 p = mesh.vertices[static_cast<std::size_t>(a)], q = mesh.vertices[static_cast<std::size_t>(b)];
        long x0 = std::lround(p.x), y0 = std::lround(p.y);
        const long x1 = std::lround(q.x), y1 = std::lround(q.y);
        const long dx = std::labs(x1 - x0), dy = -std::labs(y1 - y0);
        const long sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
        long err = dx + dy;
        while (true) {
            plot(x0, y0);
            if (x0 == x1 && y0 == y1) break;
            const long e2 = 2 * err;
            if (e2 >= dy) err += dy, x0 += sx;
            if (e2 <= dx) err += dx, y0 += sy;
        }
    }
    return GrayImage(width, height, std::move(px));
}

// ---------------------------------------------------------------- running

struct CellResult {
    ReportRow row;
    GrayImage reconstruction;
    std::optional<TriMesh> mesh;
};

/// Runs one method on one image at one density with an explicit seed.
/// Exceptions become the row's error string.
inline CellResult run_cell(const GrayImage& img, const std::string& name, Method method, double density,
                           std::uint64_t seed, const ExperimentSpec& spec) {
    CellResult out;
    ReportRow& row = out.row;
    row.image = name;
    row.width = img.width();
    row.height = img.height();
    row.method = method;
    row.density = density;
    row.seed = seed;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        if (method == Method::ama) {
            AmaConfig cfg = spec.ama;
            cfg.sample_density = density;
            cfg.seed = seed;
            auto r = ama_represent(img, cfg);
            out.reconstruction = std::move(r.image);
            out.mesh = std::move(r.mesh);
            row.iterations = cfg.outer_iterations;
            row.converged = true;
        } else {
            const auto op =
                build_measurement_op(img.width(), img.height(), density, spec.sensing_domain, seed, spec.sampling_scheme);
            const auto meas = measure(img, op, seed);
            auto r = method == Method::ista ? reconstruct_ista(meas, spec.ista) : reconstruct_tveq(meas, spec.tveq);
            out.reconstruction = std::move(r.image);
            row.iterations = r.report.iterations;
            row.converged = r.report.converged;
        }
        row.psnr_db = psnr(img, out.reconstruction);
        row.ssim = ssim(img, out.reconstruction).mean_ssim;
    } catch (const std::exception& e) {
        row.error = e.what();
        if (row.error.empty()) row.error = "unknown failure";
        out.mesh.reset();
    }
    row.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

namespace detail {

inline std::string density_label(double d) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, d);
    return std::string(buf, r.ptr);
}

/// Saves an image and reads it back to confirm the file decodes to the same
/// 8-bit raster.
inline void save_checked(const GrayImage& img, const std::filesystem::path& path) {
    save_image(img, path.string());
    const GrayImage back = load_image(path.string());
    const auto bytes = encode_pgm(img);
    if (back.width() != img.width() || back.height() != img.height() || encode_pgm(back) != bytes)
        throw IoError("round-trip check failed for " + path.string());
}

}  // namespace detail

/// Writes the reconstruction, its SSIM map and, for AMA, the mesh text and
/// wireframe into `dir`, named `<image>_<method>_d<density>_*`.
inline void write_cell_outputs(const CellResult& cell, const GrayImage& original, const std::filesystem::path& dir) {
    if (cell.row.failed()) return;
    std::filesystem::create_directories(dir);
    const std::string stem =
        cell.row.image + "_" + to_string(cell.row.method) + "_d" + detail::density_label(cell.row.density);
    detail::save_checked(cell.reconstruction, dir / (stem + "_recon.pgm"));
    detail::save_checked(ssim_map_image(ssim(original, cell.reconstruction)), dir / (stem + "_ssim.pgm"));
    if (cell.mesh) {
        save_mesh(*cell.mesh, (dir / (stem + "_mesh.txt")).string());
        detail::save_checked(render_wireframe(*cell.mesh, original.width(), original.height()),
                             dir / (stem + "_wire.pgm"));
    }
}

/// Worker count from MESHCS_WORKERS, default 1.
inline unsigned worker_count() {
    const char* env = std::getenv("MESHCS_WORKERS");
    if (!env || !*env) return 1;
    unsigned n = 0;
    const std::string_view s(env);
    const auto r = std::from_chars(s.data(), s.data() + s.size(), n);
    if (r.ec != std::errc{} || r.ptr != s.data() + s.size() || n == 0)
        throw ValidationError("MESHCS_WORKERS must be a positive integer");
    return n;
}

/// Runs every cell of the spec, image-major then method then density. Rows
/// come back in that order whatever the worker count. Cell failures are
/// recorded in the rows; an unreadable image fails all of its rows.
inline QualityReport run_experiment(const ExperimentSpec& spec, unsigned workers = worker_count()) {
    spec.validate();
    struct Job {
        std::size_t image;
        Method method;
        double density;
        std::uint64_t seed;
    };
    std::vector<std::string> names;
    for (const auto& p : spec.images) names.push_back(image_name(p));

    std::vector<Job> jobs;
    std::set<std::uint64_t> seen;
    for (std::size_t i = 0; i < spec.images.size(); ++i)
        for (Method m : spec.methods)
            for (double d : spec.densities) {
                const auto seed = cell_seed(spec.seed, names[i], m, d);
                // Cells are distinct after validation, so equal seeds are a collision.
                if (!seen.insert(seed).second) throw ValidationError("child seed collision between cells");
                jobs.push_back({i, m, d, seed});
            }

    std::vector<std::optional<GrayImage>> images(spec.images.size());
    std::vector<std::string> load_errors(spec.images.size());
    for (std::size_t i = 0; i < spec.images.size(); ++i) {
        try {
            images[i] = load_image(spec.images[i]);
        } catch (const std::exception& e) {
            load_errors[i] = e.what();
        }
    }

    QualityReport report;
    report.rows.resize(jobs.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t k; (k = next.fetch_add(1)) < jobs.size();) {
            const Job& job = jobs[k];
            if (!images[job.image]) {
                ReportRow& row = report.rows[k];
                row.image = names[job.image];
                row.method = job.method;
                row.density = job.density;
                row.seed = job.seed;
                row.error = load_errors[job.image];
                continue;
            }
            const GrayImage& img = *images[job.image];
            CellResult cell = run_cell(img, names[job.image], job.method, job.density, job.seed, spec);
            if (!spec.output_dir.empty()) {
                try {
                    write_cell_outputs(cell, img, spec.output_dir);
                } catch (const std::exception& e) {
                    cell.row.error = std::string("output: ") + e.what();
                }
            }
            report.rows[k] = std::move(cell.row);
        }
    };
    const unsigned n = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(jobs.size())));
    if (n == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < n; ++t) pool.emplace_back(work);
    }
    return report;
}

// ---------------------------------------------------------------- CSV / Markdown

inline const char* kReportHeader =
    "image,resolution,method,density,psnr_db,ssim,iterations,converged,seed,error,wall_time_s";

namespace detail {

inline std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

inline double parse_real(const std::string& s) {
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::nan("");
    double v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) throw ValidationError("bad number '" + s + "' in report");
    return v;
}

template <class T>
T parse_int(const std::string& s) {
    T v{};
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) throw ValidationError("bad integer '" + s + "' in report");
    return v;
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

/// Splits CSV text into records of fields, honoring double-quoted fields.
inline std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> rec;
    std::string field;
    bool quoted = false, any = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') field += '"', ++i;
            else if (c == '"') quoted = false;
            else field += c;
        } else if (c == '"') {
            quoted = any = true;
        } else if (c == ',') {
            rec.push_back(std::move(field));
            field.clear();
            any = true;
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
            if (any || !field.empty()) {
                rec.push_back(std::move(field));
                records.push_back(std::move(rec));
            }
            field.clear();
            rec.clear();
            any = false;
        } else {
            field += c;
            any = true;
        }
    }
    if (quoted) throw ValidationError("unterminated quote in report");
    if (any || !field.empty()) {
        rec.push_back(std::move(field));
        records.push_back(std::move(rec));
    }
    return records;
}

}  // namespace detail

inline std::string report_to_csv(const QualityReport& report) {
    std::string out = std::string(kReportHeader) + "\n";
    for (const auto& r : report.rows) {
        out += detail::csv_field(r.image) + "," + r.resolution() + "," + to_string(r.method) + "," +
               detail::format_real(r.density) + "," + detail::format_real(r.psnr_db) + "," +
               detail::format_real(r.ssim) + "," + std::to_string(r.iterations) + "," +
               (r.converged ? "true" : "false") + "," + std::to_string(r.seed) + "," + detail::csv_field(r.error) +
               "," + detail::format_real(r.wall_time_s) + "\n";
    }
    return out;
}

inline QualityReport report_from_csv(const std::string& text) {
    const auto records = detail::parse_csv(text);
    if (records.empty()) throw ValidationError("empty report");
    std::string header;
    for (std::size_t i = 0; i < records[0].size(); ++i) header += (i ? "," : "") + records[0][i];
    if (header != kReportHeader) throw ValidationError("unexpected report header");
    QualityReport rep;
    for (std::size_t k = 1; k < records.size(); ++k) {
        const auto& f = records[k];
        if (f.size() != 11) throw ValidationError("report row " + std::to_string(k) + " has the wrong field count");
        ReportRow r;
        r.image = f[0];
        const auto x = f[1].find('x');
        if (x == std::string::npos) throw ValidationError("bad resolution '" + f[1] + "'");
        r.width = detail::parse_int<std::size_t>(f[1].substr(0, x));
        r.height = detail::parse_int<std::size_t>(f[1].substr(x + 1));
        r.method = method_from_string(f[2]);
        r.density = detail::parse_real(f[3]);
        r.psnr_db = detail::parse_real(f[4]);
        r.ssim = detail::parse_real(f[5]);
        r.iterations = detail::parse_int<int>(f[6]);
        if (f[7] != "true" && f[7] != "false") throw ValidationError("bad converged flag '" + f[7] + "'");
        r.converged = f[7] == "true";
        r.seed = detail::parse_int<std::uint64_t>(f[8]);
        r.error = f[9];
        r.wall_time_s = detail::parse_real(f[10]);
        rep.rows.push_back(std::move(r));
    }
    return rep;
}

/// CSV with the trailing timing field removed from every record.
inline std::string strip_timing(const std::string& csv) {
    std::string out;
    for (const auto& rec : detail::parse_csv(csv)) {
        for (std::size_t i = 0; i + 1 < rec.size(); ++i) out += (i ? "," : "") + detail::csv_field(rec[i]);
        out += "\n";
    }
    return out;
}

/// Markdown tables, one per density: a row per image with PSNR and SSIM
/// column groups over the methods, then failures and timings.
inline std::string report_to_markdown(const QualityReport& report) {
    std::vector<double> densities;
    std::vector<Method> methods;
    std::vector<std::string> images;
    auto add_unique = [](auto& v, const auto& x) {
        if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
    };
    for (const auto& r : report.rows) {
        add_unique(densities, r.density);
        add_unique(methods, r.method);
        add_unique(images, r.image);
    }
    auto fixed = [](double v, int prec) {
        if (std::isnan(v)) return std::string("n/a");
        if (std::isinf(v)) return std::string("inf");
        std::ostringstream s;
        s.setf(std::ios::fixed);
        s.precision(prec);
        s << v;
        return s.str();
    };

    std::ostringstream md;
    md << "# Reconstruction quality\n";
    for (double d : densities) {
        md << "\n## Sample density " << fixed(100 * d, 1) << "%\n\n| Image | Resolution |";
        for (const char* metric : {"PSNR (dB)", "SSIM"})
            for (Method m : methods) md << " " << metric << " " << to_string(m) << " |";
        md << "\n|---|---|";
        for (std::size_t i = 0; i < 2 * methods.size(); ++i) md << "---:|";
        md << "\n";
        for (const auto& img : images) {
            std::map<Method, const ReportRow*> cells;
            std::string res;
            for (const auto& r : report.rows)
                if (r.image == img && r.density == d) {
                    cells[r.method] = &r;
                    if (r.width) res = r.resolution();
                }
            md << "| " << img << " | " << res << " |";
            for (int metric = 0; metric < 2; ++metric)
                for (Method m : methods) {
                    const auto it = cells.find(m);
                    if (it == cells.end() || it->second->failed()) md << " failed |";
                    else md << " " << (metric == 0 ? fixed(it->second->psnr_db, 2) : fixed(it->second->ssim, 4)) << " |";
                }
            md << "\n";
        }
    }

    md << "\n## Runs\n\n| Image | Method | Density | Iterations | Converged | Seed | Time (s) | Error |\n"
          "|---|---|---:|---:|---|---:|---:|---|\n";
    for (const auto& r : report.rows)
        md << "| " << r.image << " | " << to_string(r.method) << " | " << detail::format_real(r.density) << " | "
           << r.iterations << " | " << (r.converged ? "yes" : "no") << " | " << r.seed << " | "
           << fixed(r.wall_time_s, 2) << " | " << r.error << " |\n";
    return md.str();
}

/// Writes report.csv and report.md into `dir`, creating it if needed.
inline void write_report(const QualityReport& report, const std::string& dir) {
    if (report.rows.empty()) throw ValidationError("report is empty");
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    auto write = [&](const std::string& name, const std::string& body) {
        const auto path = (std::filesystem::path(dir) / name).string();
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + path);
        out << body;
        if (!out) throw IoError("write failed for " + path);
    };
    write("report.csv", report_to_csv(report));
    write("report.md", report_to_markdown(report));
}

}  // namespace meshcs
