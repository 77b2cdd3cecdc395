#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "provcirc/builders.hpp"
#include "provcirc/circuit.hpp"
#include "provcirc/error.hpp"
#include "provcirc/gadgets.hpp"
#include "provcirc/grammar.hpp"
#include "provcirc/graph.hpp"
#include "provcirc/provenance.hpp"

namespace provcirc::cli {

namespace {

struct Options {
  std::string program;
  std::string db;
  std::string graph;
  std::string grammar;
  std::string semiring = "boolean";
  std::string strategy = "bellman-ford";
  std::string fact;
  std::string out;
  std::string dot;
  std::string circuit;
  std::string sizes = "4,8,16";
  std::string family = "complete";
  std::uint64_t seed = 1;
  std::size_t k = 0;
  std::optional<std::size_t> stages;
  std::size_t bound_n = 1;
  std::size_t n_max = 4;
  std::size_t limit = 1000000;
  bool check = false;
  bool no_timing = false;
  bool naive = false;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path);
  out << text;
}

const char* kTcProgram = "T(x,y) :- E(x,y).\nT(x,y) :- T(x,z), E(z,y).\n";

/// A program over the single edge label of `g` computing its transitive closure.
Program tc_program_for(const Graph& g) {
  std::set<std::string> labels;
  for (const auto& e : g.edges()) labels.insert(e.label);
  if (labels.size() > 1) throw UsageError("graph has several labels; pass --program");
  std::string label = labels.empty() ? "E" : *labels.begin();
  std::string text = kTcProgram;
  for (std::size_t pos = 0; (pos = text.find("E(", pos)) != std::string::npos; pos += label.size() + 1) {
    text.replace(pos, 1, label);
  }
  return parse_program(text);
}

struct Instance {
  std::optional<Program> program;
  Database db;
  std::optional<Graph> graph;  ///< set when the input was a labeled graph
};

Instance load_instance(const Options& o) {
  Instance inst;
  if (!o.program.empty()) inst.program = parse_program(read_file(o.program));
  if (!o.graph.empty()) {
    GraphInstance gi = parse_graph(read_file(o.graph));
    inst.db = std::move(gi.db);
    inst.graph = std::move(gi.graph);
  } else if (!o.db.empty()) {
    inst.db = parse_database(read_file(o.db), inst.program ? &*inst.program : nullptr);
  }
  if (!inst.program && !inst.graph) throw UsageError("pass --program (with --db) or --graph");
  return inst;
}

GroundAtom require_fact(const Options& o) {
  if (o.fact.empty()) throw UsageError("--fact is required, e.g. --fact 'T(s,t)'");
  return parse_ground_atom(o.fact);
}

bool graph_strategy(Strategy s) {
  return s == Strategy::BellmanFord || s == Strategy::Squaring || s == Strategy::LayeredGraph;
}

/// Stages of a path strategy on an n-vertex graph.
std::size_t path_stages(Strategy strategy, std::size_t n, bool closed) {
  if (strategy == Strategy::BellmanFord) return closed ? n : n - 1;
  if (strategy == Strategy::Squaring) return ceil_log2(n);
  return 0;
}

BuilderReport compile(const Options& o, const Instance& inst, const GroundAtom& fact) {
  Strategy strategy = parse_strategy(o.strategy);
  if (graph_strategy(strategy)) {
    if (fact.args.size() != 2) throw UsageError("graph strategies need a binary fact");
    if (inst.program) {
      Program p = inst.program->with_target(fact.predicate);
      if (!p.classification().chain) fail(ErrorCode::NotChain, "graph strategies need a chain program");
      if (!p.classification().left_linear) fail(ErrorCode::NotLeftLinear, "graph strategies need a left-linear program");
      Graph g = graph_from_database(inst.db);
      auto s = g.find_vertex(fact.args[0]);
      auto t = g.find_vertex(fact.args[1]);
      CircuitBuilder b;
      if (!s || !t) return make_report(b.finalize(b.zero()), strategy, 0);
      Circuit c = rpq_via_tc(g, program_to_grammar(p), *s, *t, strategy);
      return make_report(std::move(c), strategy, path_stages(strategy, g.num_vertices(), *s == *t));
    }
    const Graph& g = *inst.graph;
    auto s = g.find_vertex(fact.args[0]);
    auto t = g.find_vertex(fact.args[1]);
    if (!s || !t) fail(ErrorCode::InvalidArgument, "unknown vertex in " + to_string(fact));
    std::size_t stages = path_stages(strategy, g.num_vertices(), *s == *t);
    switch (strategy) {
      case Strategy::BellmanFord: return make_report(build_bellman_ford(g, *s, *t), strategy, stages);
      case Strategy::Squaring: return make_report(build_repeated_squaring(g, *s, *t), strategy, stages);
      default: return make_report(build_layered_graph(g, *s, *t), strategy, stages);
    }
  }
  Program p = inst.program ? *inst.program : tc_program_for(*inst.graph);
  switch (strategy) {
    case Strategy::LayeredNaive: {
      std::size_t k = o.k;
      if (k == 0) k = std::max<std::size_t>(1, ground(p, inst.db).idb_facts.size());
      return make_report(build_layered_naive(p, inst.db, fact, k), strategy, k);
    }
    case Strategy::Magic: return make_report(build_magic_bounded(p, inst.db, fact), strategy, 0);
    default: {
      std::size_t K = o.stages ? *o.stages : default_uvg_stages(p, inst.db, fact);
      return make_report(build_uvg(p, inst.db, fact, K), strategy, K);
    }
  }
}

std::string report_line(const BuilderReport& r) {
  return r.strategy + "," + std::to_string(r.size) + "," + std::to_string(r.depth) + "," + std::to_string(r.stages);
}

std::vector<std::string> fact_labels(const Database& db) {
  std::vector<std::string> labels;
  for (const auto& f : db.facts()) labels.push_back(to_string(f.atom));
  return labels;
}

int cmd_compile(const Options& o, std::ostream& out) {
  Instance inst = load_instance(o);
  GroundAtom fact = require_fact(o);
  BuilderReport r = compile(o, inst, fact);
  if (!o.out.empty()) write_file(o.out, to_json(r.circuit) + "\n");
  if (!o.dot.empty()) {
    auto labels = fact_labels(inst.db);
    write_file(o.dot, to_dot(r.circuit, &labels));
  }
  out << report_line(r) << "\n";
  return kOk;
}

int cmd_eval(const Options& o, std::ostream& out) {
  Instance inst = load_instance(o);
  GroundAtom fact = require_fact(o);
  SemiringSpec spec = builtin(o.semiring);
  if (o.naive) {
    Program p = inst.program ? *inst.program : tc_program_for(*inst.graph);
    NaiveResult r = naive_eval(p, inst.db, spec);
    out << format(r.value(fact, spec)) << "\n";
    return kOk;
  }
  Circuit c = o.circuit.empty() ? compile(o, inst, fact).circuit : circuit_from_json(read_file(o.circuit));
  out << format(evaluate(c, spec, weights_assignment(inst.db, spec))) << "\n";
  return kOk;
}

int cmd_verify(const Options& o, std::ostream& out) {
  Instance inst = load_instance(o);
  GroundAtom fact = require_fact(o);
  BuilderReport r = compile(o, inst, fact);
  Program p = inst.program ? *inst.program : tc_program_for(*inst.graph);
  Polynomial oracle = oracle_polynomial(p, inst.db, fact, false, o.limit);
  Polynomial produced = symbolic_polynomial(r.circuit, false);
  if (produced == oracle) {
    out << "OK " << r.strategy << " " << oracle.size() << " monomials\n";
    return kOk;
  }
  out << "MISMATCH " << r.strategy << "\n";
  for (const auto& m : oracle.monomials)
    if (std::find(produced.monomials.begin(), produced.monomials.end(), m) == produced.monomials.end())
      out << "missing: " << to_string(Polynomial{{m}}, &inst.db) << "\n";
  for (const auto& m : produced.monomials)
    if (std::find(oracle.monomials.begin(), oracle.monomials.end(), m) == oracle.monomials.end())
      out << "extra: " << to_string(Polynomial{{m}}, &inst.db) << "\n";
  return kMismatch;
}

std::vector<std::size_t> parse_sizes(const std::string& text) {
  std::vector<std::size_t> sizes;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      sizes.push_back(std::stoul(item));
    } catch (const std::exception&) {
      throw UsageError("bad size '" + item + "' in --sizes");
    }
  }
  if (sizes.empty()) throw UsageError("--sizes is empty");
  return sizes;
}

int cmd_measure(const Options& o, std::ostream& out) {
  std::vector<std::string> strategies;
  {
    std::stringstream ss(o.strategy);
    std::string s;
    while (std::getline(ss, s, ',')) strategies.push_back(s);
  }
  std::ostringstream csv;
  csv << "strategy,n,m,size,depth,build_ms\n";
  for (const auto& name : strategies) {
    Strategy strategy = parse_strategy(name);
    for (std::size_t n : parse_sizes(o.sizes)) {
      GraphInstance gi;
      std::string s = "v0";
      std::string t = "v" + std::to_string(n == 0 ? 0 : n - 1);
      if (o.family == "complete") {
        gi = complete_digraph(n);
      } else if (o.family == "layered") {
        gi = layered_graph(2, n);
        s = "s";
        t = "t";
      } else if (o.family == "random") {
        gi = random_graph(n, n <= 1 ? 0.0 : std::min(1.0, 3.0 / static_cast<double>(n)), o.seed + n);
      } else {
        throw UsageError("unknown family '" + o.family + "'");
      }
      if (n == 0) throw UsageError("sizes must be positive");
      Options local = o;
      local.strategy = name;
      Instance inst{std::nullopt, gi.db, gi.graph};
      GroundAtom fact{"T", {s, t}};
      auto start = std::chrono::steady_clock::now();
      BuilderReport r = compile(local, inst, fact);
      auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
      std::ostringstream build_ms;
      build_ms.setf(std::ios::fixed);
      build_ms.precision(3);
      build_ms << (o.no_timing ? 0.0 : ms);
      csv << to_string(strategy) << "," << gi.graph.num_vertices() << "," << gi.graph.num_edges() << "," << r.size
          << "," << r.depth << "," << build_ms.str() << "\n";
    }
  }
  if (o.out.empty()) {
    out << csv.str();
  } else {
    write_file(o.out, csv.str());
  }
  return kOk;
}

bool reachable(const Graph& g, std::size_t s, std::size_t t) {
  std::vector<bool> seen(g.num_vertices(), false);
  std::vector<std::size_t> stack{s};
  seen[s] = true;
  while (!stack.empty()) {
    std::size_t v = stack.back();
    stack.pop_back();
    for (std::size_t e : g.out_edges(v)) {
      std::size_t w = g.edge(e).dst;
      if (!seen[w]) {
        seen[w] = true;
        stack.push_back(w);
      }
    }
  }
  return seen[t] && s != t;
}

int cmd_reduce(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.grammar.empty() || o.graph.empty()) throw UsageError("reduce needs --grammar and --graph");
  Grammar grammar = parse_grammar(read_file(o.grammar));
  GraphInstance original = parse_graph(read_file(o.graph));
  GroundAtom endpoints = o.fact.empty() ? GroundAtom{"T", {"s", "t"}} : parse_ground_atom(o.fact);
  if (endpoints.args.size() != 2) throw UsageError("--fact must name two vertices");
  auto s = original.graph.find_vertex(endpoints.args[0]);
  auto t = original.graph.find_vertex(endpoints.args[1]);
  if (!s || !t) fail(ErrorCode::InvalidArgument, "unknown vertex in " + to_string(endpoints));

  bool regular = is_left_linear(grammar);
  std::optional<RegularDecomposition> rd;
  std::optional<CfgDecomposition> cd;
  if (regular) {
    rd = find_pumping_regular(grammar);
  } else {
    cd = find_pumping_cfg(grammar);
  }
  auto expand = [&](const GraphInstance& g) {
    return regular ? expand_instance_regular(g, *s, *t, *rd) : expand_instance_cfg(g, *s, *t, *cd);
  };
  ExpandedInstance ex = expand(original);

  std::ostringstream tsv;
  for (const auto& e : ex.instance.graph.edges()) {
    tsv << ex.instance.graph.name(e.src) << "\t" << ex.instance.graph.name(e.dst) << "\t" << e.label << "\n";
  }
  std::ostringstream map;
  for (const auto& [from, to] : ex.edge_map) {
    map << "map\t" << original.db.label(from) << "\t" << ex.instance.db.label(to) << "\n";
  }
  for (FactVar v : ex.ones) map << "one\t" << ex.instance.db.label(v) << "\n";
  if (o.out.empty()) {
    out << tsv.str() << map.str();
  } else {
    write_file(o.out + ".tsv", tsv.str());
    write_file(o.out + ".map.tsv", map.str());
  }
  out << "decomposition: "
      << (regular ? "x=" + to_string(rd->x) + " y=" + to_string(rd->y) + " z=" + to_string(rd->z)
                  : "u=" + to_string(cd->u) + " v=" + to_string(cd->v) + " w=" + to_string(cd->w) +
                        " x=" + to_string(cd->x) + " y=" + to_string(cd->y))
      << "\n";
  out << "target: " << grammar.start << "(" << ex.s_bar << "," << ex.t_bar << ")\n";
  if (!o.check) return kOk;

  std::size_t m = original.graph.num_edges();
  if (m > 8) throw UsageError("--check enumerates edge subsets and needs at most 8 edges");
  Program chain = grammar_to_program(grammar);
  SemiringSpec boolean = builtin("boolean");
  for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
    GraphInstance sub;
    for (std::size_t v = 0; v < original.graph.num_vertices(); ++v) sub.graph.vertex(original.graph.name(v));
    for (std::size_t e = 0; e < m; ++e) {
      if ((mask >> e & 1U) == 0) continue;
      const Edge& edge = original.graph.edge(e);
      sub.add_edge(original.graph.name(edge.src), original.graph.name(edge.dst), edge.label);
    }
    ExpandedInstance sx = expand(sub);
    Assignment ones;
    for (const auto& f : sx.instance.db.facts()) ones[f.var] = true;
    NaiveResult r = naive_eval(chain, sx.instance.db, boolean, ones);
    bool accepted = std::get<bool>(r.value(GroundAtom{grammar.start, {sx.s_bar, sx.t_bar}}, boolean));
    if (accepted != reachable(sub.graph, *s, *t)) {
      err << "check failed for edge subset " << mask << "\n";
      return kMismatch;
    }
  }
  out << "check: " << (std::size_t{1} << m) << " edge subsets agree\n";
  return kOk;
}

int cmd_check_bounded(const Options& o, std::ostream& out) {
  if (!o.grammar.empty()) {
    out << (is_finite(parse_grammar(read_file(o.grammar))) ? "FINITE" : "INFINITE") << "\n";
    return kOk;
  }
  if (o.program.empty()) throw UsageError("check-bounded needs --program or --grammar");
  Program p = parse_program(read_file(o.program));
  if (p.classification().chain) {
    out << (is_finite(program_to_grammar(p)) ? "FINITE" : "INFINITE") << "\n";
    return kOk;
  }
  out << to_string(check_bounded_witness(p, o.bound_n, o.n_max)) << "\n";
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Compile Datalog provenance into semiring circuits"};
  app.require_subcommand(1);
  auto add_instance = [&](CLI::App* sub) {
    sub->add_option("--program", o.program, "Datalog program file");
    sub->add_option("--db", o.db, "database TSV: predicate, args, optional weight");
    sub->add_option("--graph", o.graph, "labeled graph TSV: src dst label [weight]");
    sub->add_option("--fact", o.fact, "target fact, e.g. T(s,t)");
    sub->add_option("--strategy", o.strategy, "naive|layered-graph|bellman-ford|squaring|magic|uvg");
    sub->add_option("--k", o.k, "layers for the naive strategy (default: number of IDB facts)");
    sub->add_option("--stages", o.stages, "stages for the uvg strategy");
  };
  auto* compile_cmd = app.add_subcommand("compile", "build a circuit and print strategy,size,depth,stages");
  add_instance(compile_cmd);
  compile_cmd->add_option("--out", o.out, "write circuit JSON here");
  compile_cmd->add_option("--dot", o.dot, "write circuit DOT here");

  auto* eval_cmd = app.add_subcommand("eval", "evaluate the fact over a semiring using the weight column");
  add_instance(eval_cmd);
  eval_cmd->add_option("--semiring", o.semiring, "boolean|tropical|counting|minmax");
  eval_cmd->add_option("--circuit", o.circuit, "evaluate this circuit JSON instead of compiling");
  eval_cmd->add_flag("--naive", o.naive, "use naive evaluation instead of a circuit");

  auto* verify_cmd = app.add_subcommand("verify", "compare the circuit polynomial with the proof-tree oracle");
  add_instance(verify_cmd);
  verify_cmd->add_option("--limit", o.limit, "largest number of tight proof trees the oracle enumerates");

  auto* measure_cmd = app.add_subcommand("measure", "size/depth sweep as CSV");
  measure_cmd->add_option("--strategy", o.strategy, "comma-separated strategies");
  measure_cmd->add_option("--sizes", o.sizes, "comma-separated vertex counts (layer counts for layered)");
  measure_cmd->add_option("--family", o.family, "complete|layered|random");
  measure_cmd->add_option("--seed", o.seed, "seed for the random family");
  measure_cmd->add_option("--out", o.out, "write CSV here");
  measure_cmd->add_flag("--no-timing", o.no_timing, "report build_ms as 0 for reproducible output");

  auto* reduce_cmd = app.add_subcommand("reduce", "expand a layered graph with a pumping decomposition");
  reduce_cmd->add_option("--grammar", o.grammar, "grammar file");
  reduce_cmd->add_option("--graph", o.graph, "layered graph TSV");
  reduce_cmd->add_option("--fact", o.fact, "endpoints as P(s,t) (default T(s,t))");
  reduce_cmd->add_option("--out", o.out, "write <out>.tsv and <out>.map.tsv");
  reduce_cmd->add_flag("--check", o.check, "check reachability equivalence over all edge subsets");

  auto* bounded_cmd = app.add_subcommand("check-bounded", "finiteness or homomorphism witness search");
  bounded_cmd->add_option("--program", o.program, "Datalog program file");
  bounded_cmd->add_option("--grammar", o.grammar, "grammar file");
  bounded_cmd->add_option("--N", o.bound_n, "candidate bound");
  bounded_cmd->add_option("--n-max", o.n_max, "largest level searched");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }
  try {
    if (*compile_cmd) return cmd_compile(o, out);
    if (*eval_cmd) return cmd_eval(o, out);
    if (*verify_cmd) return cmd_verify(o, out);
    if (*measure_cmd) return cmd_measure(o, out);
    if (*reduce_cmd) return cmd_reduce(o, out, err);
    if (*bounded_cmd) return cmd_check_bounded(o, out);
  } catch (const UsageError& e) {
    err << "usage: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << e.what() << "\n";
    if (e.code() == ErrorCode::LimitExceeded || e.code() == ErrorCode::CapExceeded) return kOracleLimit;
    return kUsage;
  }
  return kUsage;
}

}  // namespace provcirc::cli
