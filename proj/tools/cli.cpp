#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

#include "optor/io.hpp"
#include "optor/resolution.hpp"
#include "optor/stock.hpp"
#include "optor/torsor.hpp"
#include "optor/zigzag.hpp"

namespace optor::cli {

namespace {

struct WindowFlags {
  int max_arity = 0, deg_lo = 0, deg_hi = 0;

  void attach(CLI::App* app) {
    app->add_option("--max-arity", max_arity, "largest arity examined")->required()->check(CLI::PositiveNumber);
    app->add_option("--deg-lo", deg_lo, "lowest degree examined")->required();
    app->add_option("--deg-hi", deg_hi, "highest degree examined")->required();
  }
  Window window() const { return Window{max_arity, deg_lo, deg_hi}; }
};

std::string matrix_text(const Matrix& m) {
  if (m.rows() == 0 || m.cols() == 0) return "[" + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + "]";
  std::string s = "[";
  for (std::size_t i = 0; i < m.rows(); ++i) {
    if (i) s += "; ";
    for (std::size_t j = 0; j < m.cols(); ++j) s += (j ? " " : "") + format_scalar(m.at(i, j));
  }
  return s + "]";
}

std::string key_text(Key k) { return "(" + std::to_string(k.arity) + ", " + std::to_string(k.degree) + ")"; }

BimodulePtr load_bimodule(const std::string& file) {
  io::Document d = io::load(file);
  if (auto* m = std::get_if<std::shared_ptr<TabulatedBimodule>>(&d)) return *m;
  if (auto* p = std::get_if<std::shared_ptr<TabulatedOperad>>(&d)) return std::make_shared<CanonicalBimodule>(*p);
  throw io::SemanticError("'" + file + "' describes neither an operad nor a bimodule");
}

GroupTable load_group(const std::string& spec) {
  std::ifstream probe(spec);
  if (probe) {
    io::Document d = io::load(spec);
    if (auto* g = std::get_if<GroupTable>(&d)) return *g;
    throw io::SemanticError("'" + spec + "' is not a group table");
  }
  try {
    return named_group(spec);
  } catch (const std::invalid_argument&) {
    throw io::SemanticError("'" + spec + "' is neither a readable file nor a known group name");
  }
}

void print_torsor(std::ostream& out, const std::string& what, const TorsorReport& r) {
  out << what << ": " << (r.holds ? "true" : "false") << "\n";
  for (const auto& l : r.lines) out << "  " << l << "\n";
}

void print_isomorphism(std::ostream& out, const std::map<Key, Matrix>& phi) {
  for (const auto& [k, m] : phi) out << "  " << key_text(k) << ": " << matrix_text(m) << "\n";
}

int cmd_validate(const std::string& file, std::ostream& out) {
  io::Document d = io::load(file);
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::shared_ptr<TabulatedOperad>>) {
          out << "operad '" << x->name() << "': axioms hold\n";
          for (const Key& k : x->basis().keys()) out << "  dim " << key_text(k) << " = " << x->basis().dim(k) << "\n";
        } else if constexpr (std::is_same_v<T, std::shared_ptr<TabulatedBimodule>>) {
          out << "bimodule '" << x->name() << "' over '" << x->left_operad()->name() << "' and '"
              << x->right_operad()->name() << "': axioms hold\n";
          for (const Key& k : x->basis().keys()) out << "  dim " << key_text(k) << " = " << x->basis().dim(k) << "\n";
        } else if constexpr (std::is_same_v<T, ZigzagCertificate>) {
          out << "certificate (" << x.route << " route): well-formed, " << x.arrows.size() << " arrows, "
              << x.transcript.size() << " transcript lines; use verify to re-derive\n";
        } else {
          out << "group '" << x.name << "' of order " << x.elements.size() << ": axioms hold\n";
        }
      },
      d);
  return Ok;
}

int cmd_homology(const std::string& file, const Window& w, std::ostream& out) {
  io::Document d = io::load(file);
  std::function<ChainComplex(int)> cx;
  int top = 0;
  if (auto* p = std::get_if<std::shared_ptr<TabulatedOperad>>(&d)) {
    cx = [P = *p](int a) { return P->complex(a); };
    top = (*p)->max_arity();
  } else if (auto* m = std::get_if<std::shared_ptr<TabulatedBimodule>>(&d)) {
    cx = [M = *m](int a) { return M->complex(a); };
    top = (*m)->max_arity();
  } else {
    throw io::SemanticError("homology needs an operad or a bimodule");
  }
  bool any = false;
  for (int a = 1; a <= std::min(w.max_arity, top); ++a) {
    ChainComplex C = cx(a);
    for (int k = w.deg_lo; k <= w.deg_hi; ++k) {
      if (!C.trusted(k)) {
        out << "H" << key_text(Key{a, k}) << " untrusted\n";
        continue;
      }
      any = true;
      out << "H" << key_text(Key{a, k}) << " = " << Homology(C, k).dim() << "\n";
    }
  }
  if (!any) throw WindowError("no (arity, degree) of the window is trusted");
  return Ok;
}

int cmd_check_torsor(const std::string& file, bool quasi, const Window& w, std::ostream& out) {
  BimodulePtr M = load_bimodule(file);
  TorsorReport r = quasi ? is_quasi_torsor(*M, w) : is_torsor(*M, w);
  print_torsor(out, quasi ? "quasi-torsor" : "torsor", r);
  return r.holds ? Ok : Refuted;
}

int cmd_resolve(const std::string& file, const Window& w, std::optional<std::size_t> cap, std::ostream& out) {
  BimodulePtr M = load_bimodule(file);
  const int A = std::min(w.max_arity, M->max_arity());
  auto R = build_resolution(M, ResolutionOptions{A, w.deg_hi + 1, cap});
  out << "resolution of '" << M->name() << "': " << R->basis().total_dim() << " trees up to degree " << R->top_degree()
      << (R->finite() ? ", finite" : "") << "\n";
  for (int a = 1; a <= A; ++a) {
    out << "  arity " << a << ":";
    for (int k = w.deg_lo; k <= w.deg_hi; ++k) out << " " << R->basis().dim(Key{a, k});
    out << "  (degrees " << w.deg_lo << ".." << w.deg_hi << ")\n";
  }
  CheckReport d2 = verify_d_squared(*R);
  out << "d^2 = 0: " << (d2.ok ? "holds" : "fails") << " (" << d2.checked << " basis elements)\n";
  for (const auto& v : d2.violations) out << "  " << v << "\n";
  QuasiIsoReport pi;
  try {
    pi = is_quasi_iso(projection_pi(R).chain_maps(A), Window{A, w.deg_lo, w.deg_hi});
  } catch (const WindowError& e) {
    out << "projection is a quasi-isomorphism: unverifiable (" << e.what() << ")\n";
    return d2.ok ? WindowInsufficient : Refuted;
  }
  out << "projection is a quasi-isomorphism: " << (pi.holds ? "holds" : "fails") << "\n";
  for (const auto& e : pi.entries)
    out << "  " << key_text(Key{e.arity, e.degree}) << ": " << to_string(e.verdict) << " (" << e.source_dim << " -> "
        << e.target_dim << ")\n";
  return d2.ok && pi.holds ? Ok : Refuted;
}

void print_certificate(std::ostream& out, const ZigzagCertificate& c) {
  out << "route: " << c.route << "\n";
  for (const auto& l : c.zigzags) out << l << "\n";
  for (const auto& l : c.construction) out << "construction: " << l << "\n";
  for (const auto& l : c.transcript) out << l << "\n";
  out << "homology isomorphism H(P) -> H(Q):\n";
  print_isomorphism(out, c.homology_iso);
  out << "certificate valid: " << (c.valid ? "true" : "false") << "\n";
}

int cmd_zigzag(const std::string& file, const Window& w, const std::string& target, bool force, std::ostream& out) {
  BimodulePtr M = load_bimodule(file);
  ZigzagCertificate c = quasi_torsor_pipeline(M, w, PipelineOptions{force});
  std::ofstream f(target, std::ios::binary);
  if (!f) throw io::SemanticError("cannot write '" + target + "'");
  f << io::serialize(c);
  print_certificate(out, c);
  out << "written: " << target << "\n";
  return c.valid ? Ok : Refuted;
}

int cmd_verify(const std::string& file, std::ostream& out) {
  io::Document d = io::load(file);
  auto* c = std::get_if<ZigzagCertificate>(&d);
  if (!c) throw io::SemanticError("'" + file + "' is not a certificate");
  io::Verification v = io::verify(*c);
  for (const auto& l : v.derivation.transcript) out << l << "\n";
  out << "homology isomorphism H(P) -> H(Q):\n";
  print_isomorphism(out, v.derivation.homology_iso);
  out << "verdicts reproduced: " << (v.reproduced ? "true" : "false") << "\n";
  for (const auto& l : v.differences) out << "  " << l << "\n";
  out << "certificate valid: " << (v.valid ? "true" : "false") << "\n";
  return v.reproduced && v.valid ? Ok : Refuted;
}

int cmd_demo_group(const std::string& table, const std::string& unit, std::ostream& out) {
  GroupTable g = load_group(table);
  g.validate();
  auto Q = group_algebra_operad(g);
  std::size_t u = static_cast<std::size_t>(g.identity());
  if (!unit.empty()) {
    auto it = std::find(g.elements.begin(), g.elements.end(), unit);
    if (it == g.elements.end()) throw io::SemanticError("'" + unit + "' is not an element of " + g.name);
    u = static_cast<std::size_t>(it - g.elements.begin());
  }
  auto M = std::make_shared<CanonicalBimodule>(Q, basis_element(BasisRef{{1, 0}, u}));
  const Window w{1, 0, 0};
  out << "regular bitorsor of " << g.name << " (order " << g.elements.size() << ") with unit " << g.elements[u]
      << ", window arity 1, degree 0\n";
  TorsorReport t = is_torsor(*M, w);
  print_torsor(out, "torsor", t);
  if (!t.holds) return Refuted;
  StrictIsomorphism s = strict_torsor_isomorphism(M, w);
  out << "extracted isomorphism P -> Q in arity 1, degree 0 (columns are images):\n";
  const Matrix& m = s.morphism.at(Key{1, 0});
  for (std::size_t j = 0; j < m.cols(); ++j) {
    out << "  " << g.elements[j] << " ->";
    for (const auto& [i, a] : m.col(j)) out << " " << (a == 1 ? "" : format_scalar(a) + "*") << g.elements[i];
    out << "\n";
  }
  out << "morphism check: " << (s.check.ok ? "holds" : "fails") << " (" << s.check.checked << " instances)\n";
  return s.check.ok ? Ok : Refuted;
}

int cmd_demo_canonical(const std::string& which, int n, std::ostream& out) {
  OperadPtr Q = which == "com" ? OperadPtr(com_operad(n)) : OperadPtr(ass_operad(n));
  auto M = std::make_shared<CanonicalBimodule>(Q);
  const Window w{n, 0, 0};
  out << "canonical torsor of " << Q->name() << " up to arity " << n << ", degree 0\n";
  TorsorReport t = is_torsor(*M, w);
  print_torsor(out, "torsor", t);
  if (!t.holds) return Refuted;
  ZigzagCertificate c = quasi_torsor_pipeline(M, w);
  print_certificate(out, c);
  return c.valid ? Ok : Refuted;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"exact verification of operadic torsors and their zig-zags", "optor"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  std::string file, target, table, unit, operad;
  bool quasi = false, force = false;
  int cap = -1, n = 0;
  WindowFlags wf;

  auto* validate = app.add_subcommand("validate", "load a document and run its axiom checks");
  validate->add_option("file", file)->required();

  auto* homology = app.add_subcommand("homology", "homology dimensions of an operad or bimodule");
  homology->add_option("file", file)->required();
  wf.attach(homology);

  auto* check = app.add_subcommand("check-torsor", "decide the (quasi-)torsor property");
  check->add_option("file", file)->required();
  check->add_flag("--quasi", quasi, "quasi-isomorphisms instead of isomorphisms");
  wf.attach(check);

  auto* resolve = app.add_subcommand("resolve", "dimension table and d^2 verdict of the tree resolution");
  resolve->add_option("file", file)->required();
  resolve->add_option("--node-cap", cap, "bound on inner nodes per tree")->check(CLI::NonNegativeNumber);
  wf.attach(resolve);

  auto* zig = app.add_subcommand("zigzag", "build, verify and write a zig-zag certificate");
  zig->add_option("file", file)->required();
  zig->add_option("--out", target, "certificate file")->required();
  zig->add_flag("--force-resolution", force, "resolve even a strict torsor");
  wf.attach(zig);

  auto* verify = app.add_subcommand("verify", "re-derive every verdict of a certificate");
  verify->add_option("file", file)->required();

  auto* demo = app.add_subcommand("demo", "stock demonstrations");
  demo->require_subcommand(1);
  auto* group = demo->add_subcommand("group", "regular bitorsor of a finite group");
  group->add_option("--table", table, "group table file or name")->required();
  group->add_option("--unit", unit, "element used as the torsor unit");
  auto* canon = demo->add_subcommand("canonical", "canonical torsor of Com or Ass");
  canon->add_option("--operad", operad)->required()->check(CLI::IsMember({"com", "ass"}));
  canon->add_option("--max-arity", n)->required()->check(CLI::Range(1, 6));

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return Ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return Ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return InputError;
  }

  try {
    const std::optional<std::size_t> node_cap =
        cap < 0 ? std::nullopt : std::optional<std::size_t>(static_cast<std::size_t>(cap));
    if (*validate) return cmd_validate(file, out);
    if (*homology) return cmd_homology(file, wf.window(), out);
    if (*check) return cmd_check_torsor(file, quasi, wf.window(), out);
    if (*resolve) return cmd_resolve(file, wf.window(), node_cap, out);
    if (*zig) return cmd_zigzag(file, wf.window(), target, force, out);
    if (*verify) return cmd_verify(file, out);
    if (*group) return cmd_demo_group(table, unit, out);
    if (*canon) return cmd_demo_canonical(operad, n, out);
  } catch (const Refused& e) {
    out << "refused: " << e.what() << "\n";
    return Refuted;
  } catch (const WindowError& e) {
    err << "window insufficient: " << e.what() << "\n";
    return WindowInsufficient;
  } catch (const io::SyntaxError& e) {
    err << "syntax error: " << e.what() << "\n";
    return InputError;
  } catch (const io::SemanticError& e) {
    err << "invalid input: " << e.what() << "\n";
    return InputError;
  } catch (const ContractError& e) {
    err << "precondition violated: " << e.what() << "\n";
    return InputError;
  }
  return InputError;
}

}  // namespace optor::cli
