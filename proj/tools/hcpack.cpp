// hcpack command-line front end. Every subcommand reads and writes the JSON
// formats in hcpack/io.hpp. Exit codes: 0 ok, 1 invalid input or a failed
// check, 2 budget exhaustion under --strict.

#include "hcpack/hcpack.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

using namespace hcpack;

namespace {

struct Io {
  std::string in;
  std::string out = "-";
};

void add_io(CLI::App* sub, Io& io, bool needs_input = true) {
  if (needs_input) sub->add_option("--in", io.in, "input JSON file")->required();
  sub->add_option("--out", io.out, "output file, - for stdout");
}

void emit(const Io& io, const std::string& text) {
  if (io.out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(io.out, std::ios::binary);
  if (!f) throw FormatError("cannot write " + io.out);
  f << text;
}

Scalar rational_flag(const std::string& text, const char* name) {
  try {
    return parse_scalar(text);
  } catch (const std::exception& e) {
    throw FormatError(std::string("--") + name + ": " + e.what());
  }
}

Json with_doc(const PackingDoc& doc, Json extra) {
  Json j = to_json(doc);
  for (auto& [k, v] : extra.items()) j[k] = v;
  return j;
}

PackingDoc doc_of(const KnapsackInstance& inst, const Packing& p, std::vector<BoxSpec> boxes = {}) {
  PackingDoc doc{inst.d, inst.epsilon, p, std::move(boxes), {}};
  std::set<int> placed;
  for (const auto& pl : p.placements) placed.insert(pl.item.id);
  for (const auto& it : inst.items)
    if (!placed.count(it.id)) doc.unplaced.push_back(it);
  return doc;
}

std::vector<Scalar> scalar_list(const std::string& text, const char* name) {
  std::vector<Scalar> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) out.push_back(rational_flag(part, name));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hypercube knapsack and strip packing"};
  app.require_subcommand(1);

  // solve
  Io solve_io;
  SolveBudgets budgets;
  bool strict = false;
  std::size_t oracle_limit = 0;
  auto* solve = app.add_subcommand("solve", "structured knapsack solver with explicit budgets");
  add_io(solve, solve_io);
  solve->add_option("--max-large", budgets.max_large, "loose items per candidate");
  solve->add_option("--max-boxes", budgets.max_boxes, "boxes per candidate");
  solve->add_option("--max-side-choices", budgets.max_side_choices, "box side lengths per dimension");
  solve->add_option("--max-sizes", budgets.max_sizes, "size parameters per loose set");
  solve->add_option("--max-candidates", budgets.max_candidates, "candidate limit");
  solve->add_option("--arrange-nodes", budgets.arrange_nodes, "search nodes per arrangement");
  solve->add_option("--gap-exact-items", budgets.gap.exact_items, "GAP branch and bound up to this many items");
  solve->add_option("--gap-lp-items", budgets.gap.lp_items, "GAP LP rounding up to this many items");
  solve->add_option("--gap-node-budget", budgets.gap.node_budget, "GAP branch and bound nodes");
  solve->add_option("--oracle", oracle_limit, "also run the exact oracle when n is at most this");
  solve->add_flag("--strict", strict, "exit 2 if a budget ran out");

  // oracle
  Io oracle_io;
  std::size_t oracle_max = 7;
  auto* oracle = app.add_subcommand("oracle", "exact optimum for tiny instances");
  add_io(oracle, oracle_io);
  oracle->add_option("--max-items", oracle_max, "refuse larger instances");

  // nfdh
  Io nfdh_io;
  std::string region_text, delta_text;
  auto* nfdh = app.add_subcommand("nfdh", "next fit decreasing height into a region");
  add_io(nfdh, nfdh_io);
  nfdh->add_option("--region", region_text, "region sides, comma separated (default unit cube)");
  nfdh->add_option("--delta", delta_text, "side bound for the guarantee check (default largest item)");

  // strip
  Io strip_io;
  EnumOptions enum_opt;
  auto* strip = app.add_subcommand("strip", "strip packing of a strip instance");
  add_io(strip, strip_io);
  strip->add_option("--budget", enum_opt.budget, "configuration candidates");
  strip->add_option("--witness-nodes", enum_opt.witness_nodes, "search nodes per configuration witness");

  // transform
  Io transform_io;
  std::optional<unsigned long> depth_cap;
  std::string eps_override;
  auto* trans = app.add_subcommand("transform", "restructure a unit-cube packing into boxes");
  add_io(trans, transform_io);
  trans->add_option("--depth-cap", depth_cap, "recursion depth limit");
  trans->add_option("--eps", eps_override, "accuracy (default from the file)");

  // verify
  Io verify_io;
  auto* verify = app.add_subcommand("verify", "exact containment and overlap check");
  add_io(verify, verify_io);

  // gen
  Io gen_io;
  std::string gen_kind = "random", gen_min = "1/20", gen_max = "1/2", gen_eps = "1/4";
  std::size_t gen_d = 2, gen_n = 10, gen_k = 1;
  unsigned long gen_den = 60, gen_base = 2, gen_height = 4;
  long gen_pmin = 1, gen_pmax = 10;
  std::uint64_t gen_seed = 1;
  unsigned gen_depth = 2;
  double gen_split = 0.5;
  auto* gen = app.add_subcommand("gen", "seeded instance generators");
  add_io(gen, gen_io, false);
  gen->add_option("--kind", gen_kind, "random, shatter or strip")->check(CLI::IsMember({"random", "shatter", "strip"}));
  gen->add_option("--d", gen_d, "dimension");
  gen->add_option("--n", gen_n, "items (random)");
  gen->add_option("--seed", gen_seed, "seed");
  gen->add_option("--min-side", gen_min, "smallest side (random)");
  gen->add_option("--max-side", gen_max, "largest side (random)");
  gen->add_option("--denominator", gen_den, "sides are multiples of 1/denominator (random)");
  gen->add_option("--min-profit", gen_pmin, "smallest profit");
  gen->add_option("--max-profit", gen_pmax, "largest profit");
  gen->add_option("--eps", gen_eps, "accuracy stored in the instance");
  gen->add_option("--depth", gen_depth, "halving depth (shatter, strip)");
  gen->add_option("--split", gen_split, "split probability below the depth (shatter, strip)");
  gen->add_option("--k", gen_k, "long dimensions (strip)");
  gen->add_option("--base", gen_base, "unit cells per short side (strip)");
  gen->add_option("--height", gen_height, "unit cubes along the strip (strip)");

  // constants
  Io const_io;
  std::size_t const_d = 2;
  std::string const_eps = "1/4";
  std::string const_n;
  auto* consts = app.add_subcommand("constants", "alpha table and structural constants");
  add_io(consts, const_io, false);
  consts->add_option("--d", const_d, "dimension")->required();
  consts->add_option("--eps", const_eps, "accuracy")->required();
  consts->add_option("--N", const_n, "cell bound for the alpha table (default C_N)");

  // render
  Io render_io;
  std::string format = "svg";
  auto* render = app.add_subcommand("render", "draw a 2-D packing");
  add_io(render, render_io);
  render->add_option("--format", format, "svg or json")->check(CLI::IsMember({"svg", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;  // --help is not an error
  }

  try {
    if (*solve) {
      KnapsackInstance inst = instance_from(read_json_file(solve_io.in));
      SolveResult r = structured_solve(inst, budgets);
      if (oracle_limit > 0 && inst.items.size() <= oracle_limit && inst.d <= 3)
        certify_against_oracle(r, oracle_opt(inst, oracle_limit));
      if (!verify_packing(r.packing).ok()) throw std::logic_error("solver produced an invalid packing");
      emit(solve_io, dump(with_doc(doc_of(inst, r.packing, r.boxes), {{"certificate", to_json(r.certificate)}})));
      return strict && r.certificate.exhausted ? 2 : 0;
    }
    if (*oracle) {
      KnapsackInstance inst = instance_from(read_json_file(oracle_io.in));
      OracleResult r = oracle_opt(inst, oracle_max);
      emit(oracle_io, dump(with_doc(doc_of(inst, r.witness),
                                    {{"profit", to_json(r.profit)}, {"subsets_tested", r.subsets_tested}})));
      return 0;
    }
    if (*nfdh) {
      KnapsackInstance inst = instance_from(read_json_file(nfdh_io.in));
      Cuboid region = Cuboid::unit(inst.d);
      if (!region_text.empty()) {
        auto sides = scalar_list(region_text, "region");
        if (sides.size() != inst.d) throw FormatError("--region: expected " + std::to_string(inst.d) + " sides");
        region = Cuboid(Point(inst.d, Scalar(0)), sides);
      }
      NfdhResult r = nfdh_pack(inst.items, region);
      Json extra;
      extra["levels"] = r.levels.size();
      const Scalar delta = delta_text.empty() ? max_side(inst.items) : rational_flag(delta_text, "delta");
      bool ok = true;
      if (!inst.items.empty()) {
        GuaranteeCheck g = check_guarantee(r, delta);
        extra["guarantee"] = Json{{"ok", g.ok}, {"free_volume", to_json(g.free_volume)}, {"allowance", to_json(g.allowance)}};
        ok = g.ok;
      }
      PackingDoc doc{inst.d, inst.epsilon, r.packed, {}, r.leftovers};
      emit(nfdh_io, dump(with_doc(doc, extra)));
      return ok ? 0 : 1;
    }
    if (*strip) {
      StripInstance inst = strip_instance_from(read_json_file(strip_io.in));
      StripResult r = strip_pack(inst, enum_opt);
      if (!verify_packing(r.packing).ok()) throw std::logic_error("strip packing is invalid");
      PackingDoc doc{inst.d, inst.epsilon, r.packing, r.boxes, {}};
      emit(strip_io, dump(with_doc(doc, {{"report", height_report(r)}})));
      return 0;
    }
    if (*trans) {
      PackingDoc in = packing_from(read_json_file(transform_io.in));
      const Scalar eps = eps_override.empty() ? in.epsilon : rational_flag(eps_override, "eps");
      StructureOptions opt;
      if (depth_cap) opt.depth_cap = *depth_cap;
      StructuredPacking s = transform(in.packing, constants(in.d, eps).alpha, opt);
      PackingDoc doc{in.d, eps, s.packing, s.boxes, s.discarded};
      doc.unplaced.insert(doc.unplaced.end(), in.unplaced.begin(), in.unplaced.end());
      Json extra;
      extra["input_profit"] = to_json(s.input_profit);
      extra["retained_profit"] = to_json(s.retained_profit);
      extra["loose"] = s.loose.size();
      extra["discarded"] = s.discarded.size();
      extra["max_depth"] = s.max_depth;
      extra["depth_truncated"] = s.depth_truncated;
      extra["bounds"] = to_json(s.bounds);
      extra["count_checks"] = to_json(s.count_checks);
      emit(transform_io, dump(with_doc(doc, extra)));
      return 0;
    }
    if (*verify) {
      PackingDoc in = packing_from(read_json_file(verify_io.in));
      PackingCheck c = verify_packing(in.packing);
      Json j = to_json(c);
      j["profit"] = to_json(in.packing.profit());
      emit(verify_io, dump(j));
      return c.ok() ? 0 : 1;
    }
    if (*gen) {
      const Scalar eps = rational_flag(gen_eps, "eps");
      ShatterOptions so;
      so.depth = gen_depth;
      so.split_probability = gen_split;
      so.seed = gen_seed;
      so.profits = {gen_pmin, gen_pmax};
      if (gen_kind == "random") {
        SideDistribution sides{rational_flag(gen_min, "min-side"), rational_flag(gen_max, "max-side"), gen_den};
        emit(gen_io, dump(to_json(random_instance(gen_d, gen_n, sides, {gen_pmin, gen_pmax}, gen_seed, eps))));
      } else if (gen_kind == "shatter") {
        ShatterResult r = shatter_construction(Scalar(1), std::vector<unsigned long>(gen_d, 1), so);
        emit(gen_io, dump(to_json(PackingDoc{gen_d, eps, r.witness, {}, {}})));
      } else {
        StripShatter r = shatter_strip(gen_d, gen_k, gen_base, gen_height, so, eps);
        Json j = to_json(r.instance);
        j["h0"] = to_json(r.h0);
        emit(gen_io, dump(j));
      }
      return 0;
    }
    if (*consts) {
      const Scalar eps = rational_flag(const_eps, "eps");
      ConstantsReport r =
          const_n.empty() ? constants(const_d, eps) : constants_for(alpha_table(const_d, eps, BigInt(const_n)));
      emit(const_io, dump(to_json(r)));
      return 0;
    }
    if (*render) {
      PackingDoc in = packing_from(read_json_file(render_io.in));
      emit(render_io, format == "svg" ? render_svg(in.packing, in.boxes) : dump(to_json(in)));
      return 0;
    }
  } catch (const FormatError& e) {
    std::cerr << "hcpack: invalid input: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "hcpack: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
