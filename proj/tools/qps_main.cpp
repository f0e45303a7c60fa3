// qpslab: batch front door for the product-state approximation laboratory.
// Every run is a deterministic function of (subcommand, flags, seed).

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "qps/acceptance.hpp"
#include "qps/infotools.hpp"
#include "qps/lasserre.hpp"
#include "qps/meanfield.hpp"
#include "qps/measurement.hpp"
#include "qps/reports.hpp"

using namespace qps;
using nlohmann::ordered_json;

namespace {

struct CommonOpts {
  std::uint64_t seed = 1;
  int jobs = 1;
  std::string out;
  bool csv = false;
  int n = 4;
  int d = 2;
  std::string family = "ring";
  std::string ensemble = "random-hermitian";
  int degree = 3;
  int blocks = 1; // block size m
  int k = 2;
  int kmax = 2;
  int t = 2;
  int trials = 16;
  double tol = 1e-6;
  std::string instance_path;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_instance = true) {
  cmd->add_option("--seed", o.seed, "master 64-bit seed");
  cmd->add_option("--jobs", o.jobs, "worker count for sweeps");
  cmd->add_option("--out", o.out, "output path (stdout when omitted)");
  cmd->add_flag("--csv", o.csv, "tabular output for sweep fields");
  cmd->add_option("--n", o.n, "site count");
  cmd->add_option("--d", o.d, "local dimension");
  cmd->add_option("--family", o.family, "graph family");
  cmd->add_option("--ensemble", o.ensemble, "term ensemble");
  cmd->add_option("--degree", o.degree, "degree for random-regular");
  cmd->add_option("--blocks", o.blocks, "block size m for partitioned modes");
  cmd->add_option("--k", o.k, "level / tuple size");
  cmd->add_option("--kmax", o.kmax, "largest relaxation level");
  cmd->add_option("--t", o.t, "conditioning budget");
  cmd->add_option("--trials", o.trials, "trial / restart / sample count");
  cmd->add_option("--tol", o.tol, "solver tolerance override");
  if (with_instance)
    cmd->add_option("instance", o.instance_path, "instance JSON to load instead of generating");
}

HamiltonianInstance resolve_instance(const CommonOpts& o) {
  if (!o.instance_path.empty()) {
    std::ifstream in(o.instance_path);
    require(in.good(), ErrorKind::InvalidArgument,
            "cannot open instance file '" + o.instance_path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return load_instance(ss.str());
  }
  GeneratorSpec spec;
  spec.family = parse_family(o.family);
  spec.ensemble = parse_ensemble(o.ensemble);
  spec.n = o.n;
  spec.d = o.d;
  spec.degree = o.degree;
  return build_instance(spec, o.seed);
}

class Sink {
public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      require(file_.good(), ErrorKind::InvalidArgument, "cannot open output path '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
  std::ofstream file_;
};

void emit(const CommonOpts& o, const ordered_json& doc) {
  Sink sink(o.out);
  sink.stream() << doc.dump(2) << "\n";
}

// --- subcommand bodies -------------------------------------------------------

int cmd_gen(const CommonOpts& o) {
  HamiltonianInstance h = resolve_instance(o);
  Sink sink(o.out);
  sink.stream() << save_instance(h);
  return 0;
}

int cmd_exact(const CommonOpts& o) {
  HamiltonianInstance h = resolve_instance(o);
  GroundState gs = ground_energy(h);
  ordered_json amps = ordered_json::array();
  for (Eigen::Index i = 0; i < gs.psi0.size(); ++i)
    amps.push_back({gs.psi0(i).real(), gs.psi0(i).imag()});
  ordered_json payload = {{"e0", gs.e0}, {"psi0", amps}, {"instance", instance_meta(h)}};
  emit(o, report_envelope(payload, o.seed, instance_hash(h)));
  return 0;
}

int cmd_meanfield(const CommonOpts& o) {
  HamiltonianInstance h = resolve_instance(o);
  SweepResult sweep = meanfield_sweep(h, BlockPartition::contiguous(h.n, o.blocks), o.trials,
                                      o.seed);
  double e0 = ground_energy_only(h);
  ordered_json payload = to_json(sweep);
  payload["e0"] = e0;
  payload["e_product"] = sweep.energy;
  payload["gap"] = sweep.energy - e0;
  payload["block_size"] = o.blocks;
  payload["instance"] = instance_meta(h);
  emit(o, report_envelope(payload, o.seed, instance_hash(h)));
  return 0;
}

int cmd_bound_basic(const CommonOpts& o) {
  HamiltonianInstance h = resolve_instance(o);
  BasicBoundReport rep = bound_check_basic(h, o.trials, o.seed);
  ordered_json payload = to_json(rep);
  payload["instance"] = instance_meta(h);
  emit(o, report_envelope(payload, o.seed, instance_hash(h)));
  return rep.holds ? 0 : 1;
}

int cmd_bound_clustered(const CommonOpts& o) {
  HamiltonianInstance h = resolve_instance(o);
  ClusteredBoundReport rep =
      bound_check_clustered(h, BlockPartition::contiguous(h.n, o.blocks), nullptr, o.trials,
                            o.seed);
  ordered_json payload = to_json(rep);
  payload["instance"] = instance_meta(h);
  emit(o, report_envelope(payload, o.seed, instance_hash(h)));
  return rep.holds ? 0 : 1;
}

int cmd_bound_weighted(const CommonOpts& o) {
  HamiltonianInstance h = resolve_instance(o);
  WeightedBoundReport rep = bound_check_weighted(h, o.trials, o.seed);
  ordered_json payload = to_json(rep);
  payload["instance"] = instance_meta(h);
  emit(o, report_envelope(payload, o.seed, instance_hash(h)));
  return rep.holds ? 0 : 1;
}

int cmd_povm_check(const CommonOpts& o) {
  Povm povm = (o.d == 2) ? icosahedral_povm() : random_rank1_povm(o.d, o.seed);
  validate_povm(povm);
  double design_dev = design_moment_deviation(povm, 100, o.seed);
  ReconstructionMap map = build_reconstruction(povm);
  ordered_json dists = ordered_json::array();
  bool all_within = true;
  for (int k = 1; k <= std::min(o.k, 3); ++k) {
    DistortionReport rep = distortion_estimate(povm, k, o.trials, o.seed);
    all_within = all_within && rep.within_bound;
    dists.push_back(to_json(rep));
  }
  ordered_json payload = {{"d", o.d},
                          {"outcomes", povm.outcomes()},
                          {"design_moment_deviation", design_dev},
                          {"reconstruction_condition", map.condition},
                          {"distortion", dists}};
  emit(o, report_envelope(payload, o.seed));
  return all_within ? 0 : 1;
}

int cmd_decouple(const CommonOpts& o) {
  Sink sink(o.out);
  std::ostream& out = sink.stream();
  bool block_mode = o.blocks > 1;
  if (o.csv) {
    out << (block_mode ? "trial,lhs_min,lhs_avg,rhs,holds\n" : "trial,lhs,rhs,holds\n");
  } else {
    out << report_envelope({{"sweep", block_mode ? "block-decoupling" : "decoupling"},
                            {"trials", o.trials}},
                           o.seed)
               .dump()
        << "\n";
  }
  bool all = true;
  for (int i = 0; i < o.trials; ++i) {
    Rng rng(split_seed(o.seed, 0xdecULL + std::uint64_t(i)));
    JointDistribution p = random_distribution(std::vector<int>(std::size_t(o.n), 2), rng);
    if (block_mode) {
      BlockDecouplingReport rep =
          block_self_decoupling(p, BlockPartition::contiguous(o.n, o.blocks), o.k);
      all = all && rep.holds;
      if (o.csv)
        out << i << "," << rep.lhs_min << "," << rep.lhs_avg << "," << rep.rhs << ","
            << (rep.holds ? 1 : 0) << "\n";
      else
        out << ordered_json({{"trial", i}, {"report", to_json(rep)}}).dump() << "\n";
    } else {
      std::vector<double> mu(std::size_t(o.n), 1.0 / double(o.n));
      SelfDecouplingReport rep = self_decoupling(p, mu, o.k);
      all = all && rep.holds && rep.derandomized_holds;
      if (o.csv)
        out << i << "," << rep.lhs << "," << rep.rhs << "," << (rep.holds ? 1 : 0) << "\n";
      else
        out << ordered_json({{"trial", i}, {"report", to_json(rep)}}).dump() << "\n";
    }
  }
  return all ? 0 : 1;
}

int cmd_definetti(const CommonOpts& o) {
  Sink sink(o.out);
  std::ostream& out = sink.stream();
  if (o.csv)
    out << "trial,kind,lhs,rhs,best_m,holds\n";
  else
    out << report_envelope({{"sweep", "definetti"}, {"trials", o.trials}}, o.seed).dump() << "\n";
  bool all = true;
  Povm povm = icosahedral_povm();
  for (int i = 0; i < o.trials; ++i) {
    Rng rng(split_seed(o.seed, 0xdefULL + std::uint64_t(i)));
    JointDistribution p = random_distribution(std::vector<int>(std::size_t(o.n), 2), rng);
    DeFinettiReport crep = definetti_classical(p, o.k, o.t);
    all = all && crep.holds;
    if (o.csv)
      out << i << ",classical," << crep.lhs_min << "," << crep.rhs << "," << crep.best_m << ","
          << (crep.holds ? 1 : 0) << "\n";
    else
      out << ordered_json({{"trial", i}, {"kind", "classical"}, {"report", to_json(crep)}}).dump()
          << "\n";
    if (o.d == 2 && o.n <= 6) {
      ComplexVector psi = random_state(1 << o.n, rng);
      DensityMatrix rho{std::vector<int>(std::size_t(o.n), 2), projector(psi)};
      DeFinettiReport qrep = definetti_quantum(rho, povm, std::min(o.k, 2), o.t);
      all = all && qrep.holds;
      if (o.csv)
        out << i << ",quantum," << qrep.lhs_min << "," << qrep.rhs << "," << qrep.best_m << ","
            << (qrep.holds ? 1 : 0) << "\n";
      else
        out << ordered_json({{"trial", i}, {"kind", "quantum"}, {"report", to_json(qrep)}}).dump()
            << "\n";
    }
  }
  return all ? 0 : 1;
}

int cmd_sdp(const CommonOpts& o) {
  HamiltonianInstance h = resolve_instance(o);
  SdpOptions opts;
  opts.tol = o.tol;
  SandwichReport rep = sdp_sandwich(h, o.kmax, opts);
  ordered_json payload = to_json(rep);
  payload["instance"] = instance_meta(h);
  Sink sink(o.out);
  if (!o.out.empty()) {
    // the solution file for the deepest level
    MomentProblem pr = build_moment_problem(h, o.kmax);
    MomentSolution sol = solve_sdp(pr, opts);
    sink.stream() << solution_to_json(pr, sol);
    std::cout << report_envelope(payload, o.seed, instance_hash(h)).dump(2) << "\n";
  } else {
    sink.stream() << report_envelope(payload, o.seed, instance_hash(h)).dump(2) << "\n";
  }
  return 0;
}

int cmd_round(const CommonOpts& o) {
  HamiltonianInstance h = resolve_instance(o);
  MomentProblem pr = build_moment_problem(h, o.k);
  SdpOptions opts;
  opts.tol = o.tol;
  MomentSolution sol = solve_sdp(pr, opts);
  Povm povm = icosahedral_povm();
  RoundingReport rep = propagation_sampling(pr, sol, h, povm, o.seed, o.trials);
  ordered_json payload = to_json(rep, true);
  payload["instance"] = instance_meta(h);
  emit(o, report_envelope(payload, o.seed, instance_hash(h)));
  return 0;
}

int cmd_suite(const CommonOpts& o) {
  Sink sink(o.out);
  return run_suite(o.seed, o.jobs, sink.stream());
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"qpslab: product-state approximations to quantum ground states, at desk scale"};
  app.require_subcommand(1);

  CommonOpts opts;
  struct Cmd {
    const char* name;
    const char* help;
    int (*fn)(const CommonOpts&);
    bool with_instance;
  };
  const std::vector<Cmd> cmds = {
      {"gen", "generate an instance and emit its JSON", cmd_gen, false},
      {"exact", "exact ground energy and ground state", cmd_exact, true},
      {"meanfield", "variational product-state sweep", cmd_meanfield, true},
      {"bound-basic", "degree-based approximation check", cmd_bound_basic, true},
      {"bound-clustered", "block-partition approximation check", cmd_bound_clustered, true},
      {"bound-weighted", "collision-statistic approximation check", cmd_bound_weighted, true},
      {"povm-check", "measurement design and distortion report", cmd_povm_check, false},
      {"decouple", "conditioning decoupling sweeps", cmd_decouple, false},
      {"definetti", "conditioning de Finetti sweeps", cmd_definetti, false},
      {"sdp", "moment relaxation levels and sandwich", cmd_sdp, true},
      {"round", "propagation-sampling rounding runs", cmd_round, true},
      {"suite", "full verification battery", cmd_suite, false},
  };
  std::map<std::string, const Cmd*> dispatch;
  for (const auto& c : cmds) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    add_common(sub, opts, c.with_instance);
    dispatch[c.name] = &c;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2; // unknown flags and bad values exit 2
  }

  try {
    for (const auto& c : cmds)
      if (app.got_subcommand(c.name)) return c.fn(opts);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 2;
}
