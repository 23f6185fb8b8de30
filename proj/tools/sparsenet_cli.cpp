// sparsenet command-line tool. Exit codes: 0 ok, 2 usage, 3 validation, 4 numerical budget missed.

#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sparsenet/sparsenet.hpp"

using namespace sparsenet;

namespace {

struct ShearletFlags {
  ShearletParams p;
  double bump_scale = ShearletParams{}.bump.scale;
  std::size_t taps = ShearletParams{}.taps;

  void bind(CLI::App* app) {
    app->add_option("--alpha", p.alpha, "anisotropy alpha")->check(CLI::Range(0.0, 1.0));
    app->add_option("--delta", p.delta, "translation step delta")->check(CLI::PositiveNumber);
    app->add_option("--lmax", p.max_scale, "finest scale")->check(CLI::Range(0, 16));
    app->add_option("--taps", taps, "translates in the cone generator (taps - 1 vanishing moments)")
        ->check(CLI::Range(1, 64));
    app->add_option("--B", p.spacing_inverse, "inverse spacing of the translates")->check(CLI::PositiveNumber);
    app->add_option("--bump-scale", bump_scale, "base bump is g(s x)")->check(CLI::PositiveNumber);
  }

  ShearletParams params() const {
    ShearletParams q = p;
    q.bump.scale = bump_scale;
    q.taps = taps;
    return q;
  }
};

struct CartoonFlags {
  CartoonParams p;
  std::string file;

  void bind(CLI::App* app) {
    app->add_option("--beta", p.beta, "boundary smoothness beta")->check(CLI::Range(1.0, 2.0));
    app->add_option("--nu", p.nu, "cartoon amplitude bound nu")->check(CLI::PositiveNumber);
    app->add_option("--seed", p.seed, "cartoon seed");
    app->add_option("--cartoon", file, "cartoon parameter file (overrides --beta/--nu/--seed)");
  }

  CartoonFunction build() const { return file.empty() ? generate_cartoon(p) : cartoon_from_text(read_file(file)); }
};

std::vector<std::size_t> parse_counts(const std::string& list, const char* what) {
  std::vector<std::size_t> out;
  for (double v : parse_double_list(list)) {
    if (!(v >= 1.0) || v != std::floor(v) || v > 1e9) {
      throw ValidationError(std::string(what) + ": entries must be positive integers");
    }
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

void emit(const std::string& path, const std::string& data) {
  if (path.empty() || path == "-") {
    std::cout << data;
  } else {
    write_file_atomic(path, data);
  }
}

/// Cartoon sampled on the [0, 1]^2 grid with the shearlet system and its atom statistics.
struct ApproxSetup {
  AffineSystem sys;
  std::vector<Atom> atoms;
  SampledFunction target;
  AtomStatistics stats;
};

ApproxSetup approx_setup(const ShearletFlags& sf, const CartoonFlags& cf, std::size_t grid_n) {
  AffineSystem sys = make_shearlet_system(sf.params());
  std::vector<Atom> atoms = enumerate_atoms(sys);
  SampledFunction target = sample_cartoon(cf.build(), Grid::cube(2, 0.0, 1.0, grid_n));
  AtomStatistics stats = analyze_atoms(target, sys, atoms);
  return {std::move(sys), std::move(atoms), std::move(target), std::move(stats)};
}

std::string expansion_csv(const Expansion& exp, const AffineSystem& sys, std::span<const Atom> atoms) {
  CsvWriter w({"index", "part", "s", "l", "k", "tau", "b1", "b2", "coefficient"});
  for (const auto& t : exp.terms) {
    const Atom& a = atoms[t.atom];
    const MatrixLabel& lab = sys.labels()[a.matrix];
    w.row({std::to_string(t.atom), lab.part, std::to_string(a.variant), std::to_string(lab.scale),
           std::to_string(lab.shear), std::to_string(lab.cone), std::to_string(a.translation[0]),
           std::to_string(a.translation[1]), format_double(t.coefficient)});
  }
  return w.str();
}

int run(int argc, char** argv) {
  CLI::App app{"sparse neural network approximation toolkit"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  std::size_t grid_n = 256;
  MTermOptions mterm;
  bool no_refit = false;

  auto add_mterm = [&](CLI::App* sub) {
    sub->add_option("--grid-n", grid_n, "grid points per side on [0,1]^2")->check(CLI::Range(2, 4096));
    sub->add_option("--search-depth", mterm.search_depth, "candidate atoms (0 means 64 M^2)");
    sub->add_flag("--no-refit", no_refit, "keep thresholded coefficients");
    sub->add_option("--ridge", mterm.ridge, "refit ridge")->check(CLI::NonNegativeNumber);
    sub->add_option("--coef-bound", mterm.coefficient_bound, "reported coefficient bound D")
        ->check(CLI::PositiveNumber);
  };

  // encode
  auto* enc = app.add_subcommand("encode", "encode a .nnet network into a .nnb bitstream");
  std::string enc_in, enc_out;
  int enc_f = 16, enc_r = -1;
  bool enc_round = false, enc_normalize = false;
  enc->add_option("input", enc_in, "input .nnet")->required();
  enc->add_option("output", enc_out, "output .nnb")->required();
  enc->add_option("--F", enc_f, "fractional bits")->check(CLI::Range(1, 62));
  enc->add_option("--R", enc_r, "range bits (-1 picks the smallest that fits)")->check(CLI::Range(-1, 62));
  enc->add_flag("--round", enc_round, "round weights onto the grid instead of rejecting off-grid values");
  enc->add_flag("--normalize", enc_normalize, "drop dead nodes before encoding");

  // decode
  auto* dec = app.add_subcommand("decode", "decode a .nnb bitstream into a .nnet network");
  std::string dec_in, dec_out = "-", dec_act = "relu";
  double dec_p1 = 0.0, dec_p2 = 0.0;
  std::size_t dec_dim = 1;
  dec->add_option("input", dec_in, "input .nnb")->required();
  dec->add_option("output", dec_out, "output .nnet ('-' for stdout)");
  dec->add_option("--activation", dec_act, "relu | smooth_relu | sigmoidal")
      ->check(CLI::IsMember({"relu", "smooth_relu", "sigmoidal"}));
  dec->add_option("--act-p1", dec_p1, "knee K (smooth_relu) or order k (sigmoidal); 0 means default");
  dec->add_option("--act-p2", dec_p2, "scale (sigmoidal); 0 means default");
  dec->add_option("--input-dim", dec_dim, "input dimension for edgeless payloads")->check(CLI::Range(1, 64));

  // quantize
  auto* qnt = app.add_subcommand("quantize", "round weights to the coarsest fixed-point grid meeting a sup error");
  std::string q_in, q_out = "-";
  double q_eta = 1e-3, q_lo = 0.0, q_hi = 1.0;
  std::size_t q_n = 101;
  int q_maxf = 40, q_r = -1;
  qnt->add_option("input", q_in, "input .nnet")->required();
  qnt->add_option("output", q_out, "output .nnet ('-' for stdout)");
  qnt->add_option("--eta", q_eta, "sup error target")->check(CLI::PositiveNumber);
  qnt->add_option("--grid-n", q_n, "test grid points per side")->check(CLI::Range(2, 4096));
  qnt->add_option("--lo", q_lo, "test box lower corner (every coordinate)");
  qnt->add_option("--hi", q_hi, "test box upper corner (every coordinate)");
  qnt->add_option("--max-F", q_maxf, "largest fractional bit count tried")->check(CLI::Range(1, 62));
  qnt->add_option("--R", q_r, "range bits (-1 picks the smallest that fits)")->check(CLI::Range(-1, 62));

  // shearlets
  auto* shr = app.add_subcommand("shearlets", "build the alpha-shearlet system and list its atoms");
  ShearletFlags shr_sf;
  shr_sf.bind(shr);
  std::string shr_out = "-";
  std::size_t shr_n = 256;
  shr->add_option("-o,--output", shr_out, "atom CSV ('-' for stdout)");
  shr->add_option("--grid-n", shr_n, "grid points per side for the atom norms")->check(CLI::Range(2, 4096));

  // cartoon
  auto* car = app.add_subcommand("cartoon", "generate a seeded cartoon parameter file");
  CartoonFlags car_cf;
  car->add_option("--beta", car_cf.p.beta, "boundary smoothness beta")->check(CLI::Range(1.0, 2.0));
  car->add_option("--nu", car_cf.p.nu, "cartoon amplitude bound nu")->check(CLI::PositiveNumber);
  car->add_option("--seed", car_cf.p.seed, "cartoon seed");
  std::string car_out = "-", car_samples;
  std::size_t car_n = 256;
  car->add_option("-o,--output", car_out, "parameter file ('-' for stdout)");
  car->add_option("--samples", car_samples, "also write grid samples as CSV (x1,x2,value)");
  car->add_option("--grid-n", car_n, "grid points per side for --samples")->check(CLI::Range(2, 4096));

  // approx
  auto* apx = app.add_subcommand("approx", "M-term shearlet approximation of a cartoon");
  ShearletFlags apx_sf;
  CartoonFlags apx_cf;
  apx_sf.bind(apx);
  apx_cf.bind(apx);
  add_mterm(apx);
  std::size_t apx_m = 64;
  std::string apx_out = "-";
  apx->add_option("--M", apx_m, "number of terms")->check(CLI::Range(0, 1000000));
  apx->add_option("-o,--output", apx_out, "expansion CSV ('-' for stdout)");

  // transfer
  auto* trf = app.add_subcommand("transfer", "M-term approximation compiled into one ReLU network");
  ShearletFlags trf_sf;
  CartoonFlags trf_cf;
  trf_sf.bind(trf);
  trf_cf.bind(trf);
  add_mterm(trf);
  std::size_t trf_m = 64;
  std::string trf_out;
  trf->add_option("--M", trf_m, "number of terms")->check(CLI::Range(0, 1000000));
  trf->add_option("-o,--output", trf_out, "output .nnet")->required();

  // rate
  auto* rat = app.add_subcommand("rate", "M-term and M-edge rate experiment on a cartoon");
  ShearletFlags rat_sf;
  CartoonFlags rat_cf;
  rat_sf.bind(rat);
  rat_cf.bind(rat);
  add_mterm(rat);
  std::string rat_ms = "8,16,32,64,128,256,512", rat_out = "-", rat_report;
  bool rat_measure = false;
  rat->add_option("--Ms", rat_ms, "comma-separated term counts");
  rat->add_option("-o,--output", rat_out, "CSV ('-' for stdout)");
  rat->add_option("--report", rat_report, "write the fit report here (default: stderr)");
  rat->add_flag("--measure-networks", rat_measure, "also sample every transferred network");

  // learn
  auto* lrn = app.add_subcommand("learn", "quantized, encoded network meeting an L2 error eps");
  ShearletFlags lrn_sf;
  CartoonFlags lrn_cf;
  lrn_sf.bind(lrn);
  lrn_cf.bind(lrn);
  add_mterm(lrn);
  double lrn_eps = 0.1, lrn_gamma = 0.0, lrn_c = 0.0;
  int lrn_maxf = 40;
  std::string lrn_ms = "8,16,32,64,128,256,512", lrn_nnb, lrn_nnet, lrn_report = "-";
  lrn->add_option("--eps", lrn_eps, "target L2 error, in (0, 1/2)")->check(CLI::Range(0.0, 0.5));
  lrn->add_option("--gamma", lrn_gamma, "rate exponent (0: calibrate from --Ms)")->check(CLI::NonNegativeNumber);
  lrn->add_option("--C", lrn_c, "rate constant (0: calibrate from --Ms)")->check(CLI::NonNegativeNumber);
  lrn->add_option("--Ms", lrn_ms, "term counts used for calibration");
  lrn->add_option("--max-F", lrn_maxf, "largest fractional bit count tried")->check(CLI::Range(1, 62));
  lrn->add_option("--nnb", lrn_nnb, "write the encoded network here");
  lrn->add_option("--nnet", lrn_nnet, "write the quantized network here");
  lrn->add_option("--report", lrn_report, "report ('-' for stdout)");

  // train
  auto* trn = app.add_subcommand("train", "SGD on the bump-subnetwork topology");
  TrainConfig trn_cfg;
  std::string trn_target = "line", trn_out, trn_trace, trn_config;
  std::size_t trn_sub = 16;
  double trn_angle = 30.0;
  std::uint64_t trn_cseed = 1;
  trn->add_option("--target", trn_target, "line | cartoon")->check(CLI::IsMember({"line", "cartoon"}));
  trn->add_option("--subnetworks", trn_sub, "number of bump subnetworks")->check(CLI::Range(1, 100000));
  trn->add_option("--epochs", trn_cfg.epochs, "epochs");
  trn->add_option("--lr", trn_cfg.learning_rate, "learning rate")->check(CLI::NonNegativeNumber);
  trn->add_option("--batch", trn_cfg.batch_size, "minibatch size")->check(CLI::Range(1, 1 << 30));
  trn->add_option("--seed", trn_cfg.seed, "initialization and shuffle seed");
  trn->add_option("--grid-n", trn_cfg.grid_n, "sample grid points per side on [-1,1]^2")->check(CLI::Range(2, 4096));
  trn->add_option("--line-angle", trn_angle, "line target normal angle in degrees");
  trn->add_option("--cartoon-seed", trn_cseed, "seed of the cartoon target");
  trn->add_option("-o,--output", trn_out, "trained network .nnet")->required();
  trn->add_option("--trace", trn_trace, "per-epoch loss CSV");
  trn->add_option("--config-out", trn_config, "write a matching experiment config");

  // experiment
  auto* exp = app.add_subcommand("experiment", "error versus edges sweep (line or cartoon target)");
  std::string exp_config, exp_out = "-", exp_nnet;
  exp->add_option("--config", exp_config, "experiment config file (defaults apply when omitted)");
  exp->add_option("-o,--output", exp_out, "CSV ('-' for stdout)");
  exp->add_option("--nnet", exp_nnet, "write the final network here");
  bool exp_refit = false;
  exp->add_flag("--refit", exp_refit, "least-squares refit of the kept output weights (cartoon sweep)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: usage: " << e.what() << "\n";
    return 2;
  }
  mterm.refit = !no_refit;

  if (*enc) {
    Network net = load_nnet(enc_in);
    if (enc_normalize) net = normalize_network(net);
    const int r = enc_r < 0 ? range_bits_for(net) : enc_r;
    const QuantizationSpec spec{enc_f, r};
    spec.validate();
    if (enc_round) net = normalize_network(quantize_weights(net, spec));
    const EncodedNetwork e = encode_network(net, spec);
    save_nnb(enc_out, e);
    std::cout << "edges " << net.connectivity() << "\nbits " << e.payload.size() << "\nF " << spec.fractional_bits
              << "\nR " << spec.range_bits << "\n";
  } else if (*dec) {
    const Network net = decode_network(load_nnb(dec_in), parse_activation(dec_act, dec_p1, dec_p2), dec_dim);
    emit(dec_out, write_nnet(net));
  } else if (*qnt) {
    const Network net = load_nnet(q_in);
    detail::require(q_hi > q_lo, "quantize: need --lo < --hi");
    const Grid grid = Grid::cube(net.input_dim(), q_lo, q_hi, q_n);
    const QuantizeResult q = quantize_network(net, q_eta, grid, q_maxf, q_r < 0 ? range_bits_for(net) : q_r);
    emit(q_out, write_nnet(q.net));
    std::cerr << "F " << q.spec.fractional_bits << "\nR " << q.spec.range_bits << "\nsup_error "
              << format_double(q.sup_error) << "\n";
  } else if (*shr) {
    const AffineSystem sys = make_shearlet_system(shr_sf.params());
    const auto atoms = enumerate_atoms(sys);
    const SampledFunction zero(Grid::cube(2, 0.0, 1.0, shr_n));
    const AtomStatistics st = analyze_atoms(zero, sys, atoms);
    emit(shr_out, atoms_csv(sys, atoms, st.norms));
    std::cerr << "atoms " << atoms.size() << "\nmatrices " << sys.matrices().size() << "\nmin_eigenvalue "
              << format_double(sys.min_eigenvalue_magnitude()) << "\ntranslation_bound "
              << format_double(sys.translation_bound_constant()) << "\noccupancy "
              << format_double(sys.occupancy_constant(atoms)) << "\n";
  } else if (*car) {
    const CartoonFunction c = generate_cartoon(car_cf.p);
    emit(car_out, cartoon_to_text(c));
    if (!car_samples.empty()) {
      const SampledFunction f = sample_cartoon(c, Grid::cube(2, 0.0, 1.0, car_n));
      CsvWriter w({"x1", "x2", "value"});
      std::vector<double> x(2);
      for (std::size_t i = 0; i < f.values.size(); ++i) {
        f.grid.point(i, x);
        w.row({format_double(x[0]), format_double(x[1]), format_double(f.values[i])});
      }
      write_file_atomic(car_samples, w.str());
    }
  } else if (*apx) {
    const ApproxSetup s = approx_setup(apx_sf, apx_cf, grid_n);
    const Expansion e = m_term_approx(s.target, s.sys, s.atoms, s.stats, apx_m, mterm);
    emit(apx_out, expansion_csv(e, s.sys, s.atoms));
    std::cerr << "M " << apx_m << "\nl2_error " << format_double(e.residual) << "\nmax_abs_coefficient "
              << format_double(e.max_abs_coefficient) << "\n";
    if (e.refit_fallback) std::cerr << "warning refit fell back to thresholded coefficients\n";
    if (e.coefficient_bound_exceeded) std::cerr << "warning coefficient bound exceeded\n";
  } else if (*trf) {
    const ApproxSetup s = approx_setup(trf_sf, trf_cf, grid_n);
    const Expansion e = m_term_approx(s.target, s.sys, s.atoms, s.stats, trf_m, mterm);
    const TransferResult t = transfer_to_network(e, s.sys, s.atoms);
    const double gap = grid_norms(synthesize(e, s.sys, s.atoms, s.target.grid), sample_network(t.net, s.target.grid)).l2;
    save_nnet(trf_out, t.net);
    std::cout << "M " << trf_m << "\nedges " << t.connectivity << "\nedge_bound "
              << (t.per_atom_edges + 1) * e.terms.size() << "\nl2_error " << format_double(e.residual)
              << "\ntransfer_gap " << format_double(gap) << "\n";
  } else if (*rat) {
    const ApproxSetup s = approx_setup(rat_sf, rat_cf, grid_n);
    RateOptions o;
    o.mterm = mterm;
    o.measure_networks = rat_measure;
    const auto ms = parse_counts(rat_ms, "--Ms");
    const RateExperiment r =
        rate_experiment(s.target, s.sys, s.atoms, s.stats, ms, gamma_star_cartoon(rat_cf.build().beta), o);
    emit(rat_out, r.csv());
    if (rat_report.empty()) {
      std::cerr << r.report();
    } else {
      emit(rat_report, r.report());
    }
  } else if (*lrn) {
    const ApproxSetup s = approx_setup(lrn_sf, lrn_cf, grid_n);
    double gamma = lrn_gamma, c = lrn_c;
    if (gamma == 0.0 || c == 0.0) {
      RateOptions o;
      o.mterm = mterm;
      const RateExperiment r = rate_experiment(s.target, s.sys, s.atoms, s.stats, parse_counts(lrn_ms, "--Ms"), 1.0, o);
      const RateCalibration cal = calibrate_rate(r.fit);
      if (gamma == 0.0) gamma = cal.gamma;
      if (c == 0.0) c = cal.c;
    }
    std::cout << "gamma " << format_double(gamma) << "\nC " << format_double(c) << "\nM_eps "
              << learn_term_count(lrn_eps, gamma, c) << "\n"
              << std::flush;
    LearnOptions lo;
    lo.mterm = mterm;
    lo.max_fractional_bits = lrn_maxf;
    const LearnResult r = learn_pipeline(s.target, s.sys, s.atoms, s.stats, lrn_eps, gamma, c, lo);
    if (!lrn_nnb.empty()) save_nnb(lrn_nnb, r.encoded);
    if (!lrn_nnet.empty()) save_nnet(lrn_nnet, r.net);
    emit(lrn_report, r.report.text());
  } else if (*trn) {
    ExperimentConfig ec;
    ec.target = trn_target == "line" ? TargetKind::line : TargetKind::cartoon;
    ec.train = trn_cfg;
    ec.line_angle = trn_angle;
    ec.cartoon_seed = trn_cseed;
    ec.sizes = {trn_sub};
    ec.subnetworks = trn_sub;
    trn_cfg.validate();
    const SampledFunction target = experiment_target(ec);
    BumpModel m = build_fixed_topology(trn_sub, trn_cfg.seed);
    const LossTrace t = sgd_train(m, target, trn_cfg);
    save_nnet(trn_out, m.to_network());
    if (!trn_trace.empty()) {
      CsvWriter w({"epoch", "loss"});
      for (std::size_t i = 0; i < t.epoch_loss.size(); ++i) w.row({std::to_string(i + 1), format_double(t.epoch_loss[i])});
      write_file_atomic(trn_trace, w.str());
    }
    if (!trn_config.empty()) write_file_atomic(trn_config, experiment_config_to_text(ec));
    std::cout << "edges " << m.to_network().connectivity() << "\nfinal_l2 " << format_double(t.final_l2) << "\n";
    if (!t.epoch_loss.empty()) {
      std::cout << "first_epoch_loss " << format_double(t.epoch_loss.front()) << "\nlast_epoch_loss "
                << format_double(t.epoch_loss.back()) << "\n";
    }
  } else if (*exp) {
    ExperimentConfig ec = exp_config.empty() ? ExperimentConfig{} : experiment_config_from_text(read_file(exp_config));
    if (exp_refit) ec.refit = true;
    const ExperimentResult r = error_vs_edges_experiment(ec);
    emit(exp_out, r.csv());
    if (!exp_nnet.empty()) save_nnet(exp_nnet, r.network);
    if (ec.target == TargetKind::line) {
      std::cerr << "semilog_curvature " << format_double(r.semilog_curvature()) << "\n";
    } else {
      std::cerr << "lambda " << format_double(r.lambda) << "\nlasso_active " << r.lasso_active << "\nkkt_violation "
                << format_double(r.kkt_violation) << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const NumericalError& e) {
    std::cerr << "error: numerical: stage=" << e.stage() << " achieved=" << format_double(e.achieved()) << ": "
              << e.what() << "\n";
    return 4;
  } catch (const ParseError& e) {
    std::cerr << "error: parse: position=" << e.position() << ": " << e.what() << "\n";
    return 3;
  } catch (const ValidationError& e) {
    std::cerr << "error: validation: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 3;
  }
}
