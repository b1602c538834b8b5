// meshcs command-line front end: run, reconstruct, metrics, mesh-render.
//
// Exit codes: 0 success, 1 invalid input (bad arguments, config, or files),
// 2 when an experiment finished but some cells failed.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <meshcs/bench.hpp>

namespace {

using namespace meshcs;

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitPartial = 2;

void print_rows(const QualityReport& report) {
    for (const auto& r : report.rows) {
        if (r.failed()) {
            std::printf("%-16s %-5s d=%-6g FAILED: %s\n", r.image.c_str(), to_string(r.method).c_str(), r.density,
                        r.error.c_str());
        } else {
            std::printf("%-16s %-5s d=%-6g psnr=%8.3f dB  ssim=%.4f  it=%d%s  %.2fs\n", r.image.c_str(),
                        to_string(r.method).c_str(), r.density, r.psnr_db, r.ssim, r.iterations,
                        r.converged ? "" : " (not converged)", r.wall_time_s);
        }
    }
}

int finish(const QualityReport& report, const std::string& out_dir) {
    print_rows(report);
    if (!out_dir.empty()) {
        write_report(report, out_dir);
        std::printf("report written to %s\n", out_dir.c_str());
    }
    return report.has_failures() ? kExitPartial : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mesh-based image representation versus compressive-sampling reconstruction"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run an experiment described by a JSON config");
    std::string config_path, run_out;
    run->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
    run->add_option("--out", run_out, "Output directory (overrides output_dir in the config)");

    auto* rec = app.add_subcommand("reconstruct", "Run a single method on one image");
    std::string rec_image, rec_method, rec_out, rec_config;
    double rec_density = 0.1;
    std::uint64_t rec_seed = 0;
    rec->add_option("--image", rec_image, "Input image (PGM or PNG)")->required()->check(CLI::ExistingFile);
    rec->add_option("--method", rec_method, "tveq, ista or ama")->required();
    rec->add_option("--density", rec_density, "Sample density in (0, 1]")->required();
    rec->add_option("--seed", rec_seed, "Seed used directly for this cell");
    rec->add_option("--out", rec_out, "Output directory")->required();
    rec->add_option("--config", rec_config, "Optional JSON config supplying solver settings")
        ->check(CLI::ExistingFile);

    auto* met = app.add_subcommand("metrics", "PSNR and SSIM of a test image against a reference");
    std::string ref_path, test_path, map_path;
    met->add_option("--ref", ref_path, "Reference image")->required()->check(CLI::ExistingFile);
    met->add_option("--test", test_path, "Test image")->required()->check(CLI::ExistingFile);
    met->add_option("--ssim-map", map_path, "Write the SSIM map as PGM");

    auto* ren = app.add_subcommand("mesh-render", "Render a mesh text file as a wireframe PGM");
    std::string mesh_path, render_out;
    std::size_t render_w = 0, render_h = 0;
    ren->add_option("--mesh", mesh_path, "Mesh text file")->required()->check(CLI::ExistingFile);
    ren->add_option("--out", render_out, "Output PGM")->required();
    ren->add_option("--width", render_w, "Canvas width (default: mesh extent + 1)");
    ren->add_option("--height", render_h, "Canvas height (default: mesh extent + 1)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInvalid;
    }

    try {
        if (*run) {
            ExperimentSpec spec = load_spec(config_path);
            if (!run_out.empty()) spec.output_dir = run_out;
            return finish(run_experiment(spec), spec.output_dir);
        }
        if (*rec) {
            ExperimentSpec spec;
            if (!rec_config.empty()) spec = load_spec(rec_config);
            spec.images = {rec_image};
            spec.methods = {method_from_string(rec_method)};
            spec.densities = {rec_density};
            spec.output_dir = rec_out;
            spec.validate();
            const GrayImage img = load_image(rec_image);
            const CellResult cell =
                run_cell(img, image_name(rec_image), spec.methods[0], rec_density, rec_seed, spec);
            write_cell_outputs(cell, img, rec_out);
            return finish(QualityReport{{cell.row}}, rec_out);
        }
        if (*met) {
            const GrayImage a = load_image(ref_path), b = load_image(test_path);
            const double p = psnr(a, b);
            const SsimResult s = ssim(a, b);
            std::printf("psnr_db=%s\nssim=%.6f\n", is_exact_psnr(p) ? "inf" : std::to_string(p).c_str(), s.mean_ssim);
            if (!map_path.empty()) save_image(ssim_map_image(s), map_path);
            return kExitOk;
        }
        if (*ren) {
            const TriMesh mesh = load_mesh(mesh_path);
            const auto w = render_w ? render_w : static_cast<std::size_t>(std::ceil(mesh.domain.xmax)) + 1;
            const auto h = render_h ? render_h : static_cast<std::size_t>(std::ceil(mesh.domain.ymax)) + 1;
            save_image(render_wireframe(mesh, w, h), render_out);
            return kExitOk;
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
    return kExitInvalid;
}
