#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "pcshape/corr.hpp"
#include "pcshape/curves.hpp"
#include "pcshape/dilation.hpp"
#include "pcshape/io.hpp"
#include "pcshape/shape.hpp"

namespace pcshape::cli {

namespace fs = std::filesystem;

ExitCode exit_code_for(Errc code) {
  switch (code) {
    case Errc::insufficient_realizations:
    case Errc::degenerate_variance:
    case Errc::degenerate_defect:
    case Errc::singular_step:
    case Errc::near_cut_locus:
    case Errc::vanishing_velocity:
    case Errc::degenerate_curve:
      return kDegenerate;
    case Errc::truncation_window_exceeded:
    case Errc::grid_mismatch:
    case Errc::bad_dim:
      return kWindow;
    case Errc::io:
      return kIo;
    default:
      return kValidation;
  }
}

namespace {

struct Common {
  std::string output = "-";
  std::string format = "csv";
  bool quiet = false;
};

void add_common(CLI::App* cmd, Common& common, bool with_format) {
  cmd->add_option("-o,--output", common.output, "output file, - for standard output");
  if (with_format) {
    cmd->add_option("--format", common.format, "matrix output format")
        ->check(CLI::IsMember({"csv", "json"}));
  }
  cmd->add_flag("--quiet", common.quiet, "suppress reports on standard error");
}

void write_matrix(const Common& common, const Eigen::MatrixXd& m) {
  io::write_text(common.output,
                 common.format == "json" ? io::format_matrix_json(m) : io::format_matrix_csv(m));
}

void note(const Common& common, const std::string& text) {
  if (!common.quiet) std::cerr << text << '\n';
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << std::scientific << v;
  return os.str();
}

io::CurveDocument load_curve(const std::string& path) {
  return io::parse_curve(io::read_text(path));
}

/// Sequence behind a curve document (W_k = x_k W_0), a sequence JSON list or
/// a directory of CSV matrices.
DilationSequence load_sequence(const std::string& path) {
  if (path != "-" && fs::is_directory(path)) return io::read_sequence_directory(path);
  const std::string text = io::read_text(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    const io::CurveDocument doc = io::parse_curve(text);
    if (!doc.origin) {
      throw Error(Errc::parse, "curve has no \"origin\"; it was not produced from a dilation");
    }
    std::vector<Eigen::MatrixXd> w;
    w.reserve(doc.curve.points().size());
    for (const auto& x : doc.curve.points()) w.push_back(x.matrix() * *doc.origin);
    return DilationSequence(std::move(w));
  }
  return io::parse_dilation_sequence(text);
}

struct CurveSet {
  std::vector<std::string> ids;
  std::vector<ManifoldCurve> curves;
};

CurveSet load_curves(const std::vector<std::string>& paths, std::size_t resample, bool close) {
  CurveSet set;
  for (const auto& p : paths) {
    ManifoldCurve c = load_curve(p).curve;
    if (close) c = close_curve(c);
    if (resample > 0) c = spline_resample(c, resample);
    set.ids.push_back(p == "-" ? std::string("stdin") : fs::path(p).stem().string());
    set.curves.push_back(std::move(c));
  }
  return set;
}

std::size_t default_grid(const std::vector<ManifoldCurve>& curves, std::size_t grid) {
  if (grid > 0) return grid;
  std::size_t n = 1;
  for (const auto& c : curves) n = std::max(n, c.segments());
  return 2 * n;
}

// --- commands --------------------------------------------------------------

struct SimulateArgs {
  double a = 0.5;
  std::size_t period = 4;
  double depth = 0.5;
  std::size_t n = 33;
  std::size_t count = 1000;
  std::uint64_t seed = 1;
};

void cmd_simulate(const SimulateArgs& s, const Common& common) {
  const RealizationSet data = gen_pc_process(s.a, s.period, s.depth, s.n, s.count, s.seed);
  io::write_text(common.output, io::format_realizations(data));
}

struct EstimateArgs {
  std::string input;
  std::size_t n = 0;
  bool no_repair = false;
  double psd_tolerance = kDefaultPsdTolerance;
};

EstimatedCorrelation estimate(const std::string& input, std::size_t n, bool no_repair,
                              double psd_tolerance) {
  const RealizationSet data = io::parse_realizations(io::read_text(input));
  EstimationOptions opts;
  opts.psd_tolerance = psd_tolerance;
  opts.allow_repair = !no_repair;
  return estimate_ensemble_correlation(data, n == 0 ? data.length() : n, opts);
}

void cmd_estimate(const EstimateArgs& e, const Common& common) {
  const EstimatedCorrelation est = estimate(e.input, e.n, e.no_repair, e.psd_tolerance);
  if (est.repaired) {
    note(common, "repaired: smallest eigenvalue was " + fmt(est.min_eigenvalue_before));
  }
  write_matrix(common, est.matrix.matrix());
}

SchurParams checked_params(const CorrelationMatrix& R) {
  SchurParams params = extract_schur_params(R);
  if (!params.degenerate().empty()) {
    const auto [i, j] = params.degenerate().front();
    std::ostringstream os;
    os << params.degenerate().size() << " parameter(s) undetermined, first at (" << i + 1 << ", "
       << j + 1 << ")";
    throw Error(Errc::degenerate_defect, os.str());
  }
  return params;
}

struct ParcorsArgs {
  std::string input;
  double psd_tolerance = kDefaultPsdTolerance;
};

void cmd_parcors(const ParcorsArgs& p, const Common& common) {
  const CorrelationMatrix R = validate_spd(io::parse_matrix(io::read_text(p.input)), p.psd_tolerance);
  io::write_text(common.output, io::format_schur_params(checked_params(R)));
}

struct DilateArgs {
  std::string input;
  std::size_t dim = 0;
  bool pad = false;
  bool closed = false;
  std::string sequence_dir;
};

io::CurveDocument curve_document(const DilationSequence& seq, bool closed) {
  ManifoldCurve c = from_dilation(seq, closed);
  if (closed) c = close_curve(c);
  return {std::move(c), seq[0], component_correction(seq.dim(), seq.determinant_sign())};
}

void cmd_dilate(const DilateArgs& d, const Common& common) {
  const SchurParams params = io::parse_schur_params(io::read_text(d.input));
  const DilationSequence seq =
      build_dilation_sequence(params, d.dim, d.pad ? Coverage::padded : Coverage::full);
  if (!d.sequence_dir.empty()) io::write_sequence_directory(d.sequence_dir, seq);
  io::write_text(common.output, io::format_curve(curve_document(seq, d.closed)));
}

struct ReconstructArgs {
  std::string input;
  std::optional<std::size_t> lag;
  std::string reference;
  double psd_tolerance = kDefaultPsdTolerance;
};

void cmd_reconstruct(const ReconstructArgs& r, const Common& common) {
  const DilationSequence seq = load_sequence(r.input);
  const std::size_t lag = r.lag.value_or(seq.dim() - 1);
  const Eigen::MatrixXd band = reconstruct_band(seq, lag);
  if (!r.reference.empty()) {
    const Eigen::MatrixXd ref =
        validate_spd(io::parse_matrix(io::read_text(r.reference)), r.psd_tolerance).matrix();
    if (ref.rows() < band.rows()) {
      throw Error(Errc::dim_mismatch, "reference matrix is smaller than the reconstruction");
    }
    double worst = 0.0;
    for (Eigen::Index i = 0; i < band.rows(); ++i) {
      for (Eigen::Index j = i; j < band.cols() && j - i <= static_cast<Eigen::Index>(lag); ++j) {
        worst = std::max(worst, std::abs(band(i, j) - ref(i, j)));
      }
    }
    note(common, "max_error " + fmt(worst));
  }
  write_matrix(common, band);
}

struct CurveArgs {
  std::string input;
  std::size_t n = 0;
  std::size_t dim = 0;
  std::size_t resample = 0;
  bool closed = false;
  double psd_tolerance = kDefaultPsdTolerance;
};

void cmd_curve(const CurveArgs& c, const Common& common) {
  const EstimatedCorrelation est = estimate(c.input, c.n, false, c.psd_tolerance);
  if (est.repaired) {
    note(common, "repaired: smallest eigenvalue was " + fmt(est.min_eigenvalue_before));
  }
  const DilationSequence seq = build_dilation_sequence(checked_params(est.matrix), c.dim);
  io::CurveDocument doc = curve_document(seq, c.closed);
  if (c.resample > 0) {
    doc.curve = spline_resample(doc.curve, c.resample);
    doc.origin.reset();
    doc.correction.reset();
  }
  io::write_text(common.output, io::format_curve(doc));
}

struct DistArgs {
  std::vector<std::string> inputs;
  bool shape = false;
  bool curve = false;
  bool closed = false;
  std::size_t grid = 0;
  std::size_t max_step = kDefaultMaxStep;
  std::size_t resample = 0;
};

void cmd_dist(const DistArgs& d, const Common& common) {
  if (static_cast<int>(d.shape) + static_cast<int>(d.curve) + static_cast<int>(d.closed) > 1) {
    throw Error(Errc::parse, "--shape, --curve and --closed are exclusive");
  }
  const CurveSet set = load_curves(d.inputs, d.resample, d.closed);
  const std::size_t grid = default_grid(set.curves, d.grid);
  const std::size_t n = set.curves.size();
  Eigen::MatrixXd dist = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double v = 0.0;
      if (d.curve) {
        v = curve_distance(set.curves[i], set.curves[j]);
      } else if (d.closed) {
        v = closed_shape_distance(set.curves[i], set.curves[j], grid, d.max_step).distance;
      } else {
        v = shape_distance(set.curves[i], set.curves[j], grid, d.max_step).distance;
      }
      dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
      dist(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
    }
  }
  io::write_text(common.output, io::format_distance_matrix(set.ids, dist));
}

struct MeanArgs {
  std::vector<std::string> inputs;
  std::size_t grid = 0;
  std::size_t max_step = kDefaultMaxStep;
  std::size_t resample = 0;
  std::size_t iterations = 20;
};

void cmd_mean(const MeanArgs& m, const Common& common) {
  const CurveSet set = load_curves(m.inputs, m.resample, false);
  KarcherOptions opts;
  opts.grid = m.grid;
  opts.max_step = m.max_step;
  opts.iterations = m.iterations;
  const KarcherResult res = karcher_mean(set.curves, opts);
  note(common, "iterations " + std::to_string(res.iterations) + ", last change " + fmt(res.last_change));
  io::write_text(common.output, io::format_curve({res.mean, std::nullopt, std::nullopt}));
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Periodically correlated processes as curves on the rotation group"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  Common common;

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "generate periodically correlated AR(1) realisations");
  simulate->add_option("--a", sim.a, "AR coefficient")->check(CLI::Range(-0.999999, 0.999999));
  simulate->add_option("--period", sim.period, "modulation period")->check(CLI::PositiveNumber);
  simulate->add_option("--depth", sim.depth, "modulation depth (0 gives a stationary process)")
      ->check(CLI::Range(0.0, 0.999999));
  simulate->add_option("--n", sim.n, "samples per realisation")->check(CLI::PositiveNumber);
  simulate->add_option("--count", sim.count, "number of realisations")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sim.seed, "random seed");
  add_common(simulate, common, false);

  EstimateArgs est;
  auto* estimate_cmd = app.add_subcommand("estimate", "ensemble correlation of realisations");
  estimate_cmd->add_option("input", est.input, "realisation CSV")->required();
  estimate_cmd->add_option("--n", est.n, "leading samples to use (default: all)");
  estimate_cmd->add_flag("--no-repair", est.no_repair, "fail instead of clipping eigenvalues");
  estimate_cmd->add_option("--psd-tolerance", est.psd_tolerance);
  add_common(estimate_cmd, common, true);

  ParcorsArgs par;
  auto* parcors = app.add_subcommand("parcors", "Schur parameters of a correlation matrix");
  parcors->add_option("input", par.input, "matrix file (CSV or JSON)")->required();
  parcors->add_option("--psd-tolerance", par.psd_tolerance);
  add_common(parcors, common, false);

  DilateArgs dil;
  auto* dilate = app.add_subcommand("dilate", "dilation matrices and their curve");
  dilate->add_option("input", dil.input, "parameter JSON")->required();
  dilate->add_option("--dim", dil.dim, "truncation size")->required();
  dilate->add_flag("--pad", dil.pad, "pad past the triangle with zeros (n - 1 matrices)");
  dilate->add_flag("--closed", dil.closed, "close the curve");
  dilate->add_option("--sequence-dir", dil.sequence_dir, "also write W_XXXX.csv files here");
  add_common(dilate, common, false);

  ReconstructArgs rec;
  auto* reconstruct = app.add_subcommand("reconstruct", "correlation band from dilation matrices");
  reconstruct->add_option("input", rec.input, "curve JSON, sequence JSON or directory")->required();
  reconstruct->add_option("--lag", rec.lag, "largest lag (default: dim - 1)");
  reconstruct->add_option("--reference", rec.reference, "matrix to report the max error against");
  reconstruct->add_option("--psd-tolerance", rec.psd_tolerance);
  add_common(reconstruct, common, true);

  CurveArgs cur;
  auto* curve = app.add_subcommand("curve", "realisations to a resampled curve");
  curve->add_option("input", cur.input, "realisation CSV")->required();
  curve->add_option("--n", cur.n, "leading samples to use (default: all)");
  curve->add_option("--dim", cur.dim, "truncation size")->required();
  curve->add_option("--resample", cur.resample, "resample to this many segments");
  curve->add_flag("--closed", cur.closed, "close the curve");
  curve->add_option("--psd-tolerance", cur.psd_tolerance);
  add_common(curve, common, false);

  DistArgs dst;
  auto* dist = app.add_subcommand("dist", "pairwise distance matrix");
  dist->add_option("inputs", dst.inputs, "curve JSON files")->required();
  dist->add_flag("--shape", dst.shape, "elastic shape distance (default)");
  dist->add_flag("--curve", dst.curve, "TSRV distance without alignment");
  dist->add_flag("--closed", dst.closed, "shape distance minimised over start points");
  dist->add_option("--grid", dst.grid, "DP lattice size (default: 2N)");
  dist->add_option("--max-step", dst.max_step, "largest DP move in lattice cells")->check(CLI::Range(1, 16));
  dist->add_option("--resample", dst.resample, "resample every curve to this many segments");
  add_common(dist, common, false);

  MeanArgs mn;
  auto* mean = app.add_subcommand("mean", "Karcher mean of curves");
  mean->add_option("inputs", mn.inputs, "curve JSON files")->required();
  mean->add_option("--grid", mn.grid, "DP lattice size (default: 2N)");
  mean->add_option("--max-step", mn.max_step, "largest DP move in lattice cells")->check(CLI::Range(1, 16));
  mean->add_option("--resample", mn.resample, "resample every curve to this many segments");
  mean->add_option("--iterations", mn.iterations, "iteration cap");
  add_common(mean, common, false);

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kValidation;
  }

  try {
    if (*simulate) cmd_simulate(sim, common);
    else if (*estimate_cmd) cmd_estimate(est, common);
    else if (*parcors) cmd_parcors(par, common);
    else if (*dilate) cmd_dilate(dil, common);
    else if (*reconstruct) cmd_reconstruct(rec, common);
    else if (*curve) cmd_curve(cur, common);
    else if (*dist) cmd_dist(dst, common);
    else if (*mean) cmd_mean(mn, common);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  }
  return kOk;
}

}  // namespace pcshape::cli
