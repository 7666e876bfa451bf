#include "dima/parse.hpp"

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace dima {

namespace {

enum class Tok {
  End, Id, Number, LBrace, RBrace, LBracket, RBracket, Semi, Comma, Arrow,
  DotDot, Bang, Query, AndAnd, Lt, Le, Eq, Ge, Gt, Minus, Plus
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int line = 1, col = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) { next(); }

  const Token& peek() const { return tok_; }

  Token take() {
    Token t = tok_;
    next();
    return t;
  }

 private:
  void next() {
    skip_ws();
    tok_.line = line_;
    tok_.col = col_;
    tok_.text.clear();
    if (pos_ >= src_.size()) { tok_.kind = Tok::End; return; }
    char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      // Identifiers may contain dashes when immediately followed by a letter
      // or digit ("time-quantum-ms"); a clock difference needs whitespace.
      size_t start = pos_;
      while (pos_ < src_.size()) {
        char d = src_[pos_];
        if (std::isalnum(static_cast<unsigned char>(d)) || d == '_') { advance(); continue; }
        if (d == '-' && pos_ + 1 < src_.size() &&
            (std::isalnum(static_cast<unsigned char>(src_[pos_ + 1])) || src_[pos_ + 1] == '_')) {
          advance();
          continue;
        }
        break;
      }
      tok_.kind = Tok::Id;
      tok_.text = src_.substr(start, pos_ - start);
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t start = pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
      if (pos_ + 1 < src_.size() && src_[pos_] == '.' &&
          std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))) {
        advance();
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
      }
      tok_.kind = Tok::Number;
      tok_.text = src_.substr(start, pos_ - start);
      return;
    }
    auto two = [&](char a, char b) {
      return c == a && pos_ + 1 < src_.size() && src_[pos_ + 1] == b;
    };
    if (two('-', '>')) { advance(); advance(); tok_.kind = Tok::Arrow; return; }
    if (two('.', '.')) { advance(); advance(); tok_.kind = Tok::DotDot; return; }
    if (two('&', '&')) { advance(); advance(); tok_.kind = Tok::AndAnd; return; }
    if (two('<', '=')) { advance(); advance(); tok_.kind = Tok::Le; return; }
    if (two('>', '=')) { advance(); advance(); tok_.kind = Tok::Ge; return; }
    switch (c) {
      case '{': advance(); tok_.kind = Tok::LBrace; return;
      case '}': advance(); tok_.kind = Tok::RBrace; return;
      case '[': advance(); tok_.kind = Tok::LBracket; return;
      case ']': advance(); tok_.kind = Tok::RBracket; return;
      case ';': advance(); tok_.kind = Tok::Semi; return;
      case ',': advance(); tok_.kind = Tok::Comma; return;
      case '!': advance(); tok_.kind = Tok::Bang; return;
      case '?': advance(); tok_.kind = Tok::Query; return;
      case '<': advance(); tok_.kind = Tok::Lt; return;
      case '>': advance(); tok_.kind = Tok::Gt; return;
      case '=': advance(); tok_.kind = Tok::Eq; return;
      case '-': advance(); tok_.kind = Tok::Minus; return;
      case '+': advance(); tok_.kind = Tok::Plus; return;
      default:
        throw ParseError(line_, col_, std::string("unexpected character '") + c + "'");
    }
  }

  void skip_ws() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') { advance(); continue; }
      if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
        continue;
      }
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
        continue;
      }
      break;
    }
  }

  void advance() {
    if (src_[pos_] == '\n') { ++line_; col_ = 1; } else { ++col_; }
    ++pos_;
  }

  const std::string& src_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  Token tok_;
};

// Atoms and updates are parsed shape-first; fix their kinds against the
// declared clock/var names once the automaton is complete.
void resolve_names(Automaton& a) {
  auto fix_constraint = [&](Constraint& c) {
    for (auto& atom : c.atoms) {
      if (atom.kind == ConstraintAtom::Kind::ClockCmp && a.find_var(atom.lhs)) {
        if (atom.time_bound.den != 1)
          throw ParseError(1, 1, "variable '" + atom.lhs + "' compared to a non-integer");
        atom.kind = ConstraintAtom::Kind::VarCmp;
        atom.int_bound = atom.time_bound.num;
        atom.time_bound = TimeVal{};
      } else if (atom.kind == ConstraintAtom::Kind::ClockCmp) {
        atom.int_bound = 0;
      }
    }
  };
  for (auto& l : a.locations) fix_constraint(l.invariant);
  for (auto& e : a.edges) {
    fix_constraint(e.guard);
    for (auto& u : e.update.entries) {
      if (u.kind == UpdateEntry::Kind::VarSet && a.has_clock(u.target)) {
        if (u.value != 0)
          throw ParseError(1, 1, "clock '" + u.target + "' may only be reset to 0");
        u.kind = UpdateEntry::Kind::ClockReset;
      }
    }
  }
}

class Parser {
 public:
  explicit Parser(const std::string& src) : lx_(src) {}

  ParsedDocument parse() {
    ParsedDocument doc;
    while (lx_.peek().kind != Tok::End) {
      std::string kw = expect_id();
      if (kw == "automaton") {
        doc.automata.push_back(parse_automaton());
        resolve_names(doc.automata.back());
      } else if (kw == "system") {
        if (doc.system)
          fail("a document may contain at most one system section");
        doc.system = parse_system();
      } else {
        fail("expected 'automaton' or 'system', got '" + kw + "'");
      }
    }
    return doc;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) {
    throw ParseError(lx_.peek().line, lx_.peek().col, msg);
  }

  Token expect(Tok k, const char* what) {
    if (lx_.peek().kind != k) fail(std::string("expected ") + what);
    return lx_.take();
  }

  std::string expect_id() { return expect(Tok::Id, "identifier").text; }

  void expect_kw(const char* kw) {
    Token t = expect(Tok::Id, kw);
    if (t.text != kw) throw ParseError(t.line, t.col, std::string("expected '") + kw + "'");
  }

  bool peek_kw(const char* kw) {
    return lx_.peek().kind == Tok::Id && lx_.peek().text == kw;
  }

  TimeVal parse_number() {
    bool neg = false;
    if (lx_.peek().kind == Tok::Minus) { lx_.take(); neg = true; }
    Token t = expect(Tok::Number, "number");
    auto v = parse_timeval(t.text);
    if (!v) throw ParseError(t.line, t.col, "malformed number '" + t.text + "'");
    if (neg) v->num = -v->num;
    return *v;
  }

  std::int64_t parse_int() {
    Token t = lx_.peek();
    TimeVal v = parse_number();
    if (v.den != 1) throw ParseError(t.line, t.col, "expected an integer");
    return v.num;
  }

  // --- automaton ---

  Automaton parse_automaton() {
    Automaton a;
    a.name = expect_id();
    expect(Tok::LBrace, "'{'");
    while (lx_.peek().kind != Tok::RBrace) {
      std::string sec = expect_id();
      if (sec == "clocks") parse_clocks(a);
      else if (sec == "vars") parse_vars(a);
      else if (sec == "actions") parse_actions(a);
      else if (sec == "locations") parse_locations(a);
      else if (sec == "edges") parse_edges(a);
      else fail("unknown automaton section '" + sec + "'");
    }
    lx_.take();
    return a;
  }

  void parse_clocks(Automaton& a) {
    expect(Tok::LBrace, "'{'");
    while (lx_.peek().kind != Tok::RBrace) {
      Token t = lx_.peek();
      std::string c = expect_id();
      if (a.has_clock(c)) throw ParseError(t.line, t.col, "duplicate clock '" + c + "'");
      a.clocks.push_back(c);
      expect(Tok::Semi, "';'");
    }
    lx_.take();
  }

  void parse_vars(Automaton& a) {
    expect(Tok::LBrace, "'{'");
    while (lx_.peek().kind != Tok::RBrace) {
      Token t = lx_.peek();
      VarDecl v;
      v.name = expect_id();
      if (a.find_var(v.name)) throw ParseError(t.line, t.col, "duplicate variable '" + v.name + "'");
      expect_kw("range");
      v.lo = parse_int();
      expect(Tok::DotDot, "'..'");
      v.hi = parse_int();
      v.init = v.lo <= 0 && 0 <= v.hi ? 0 : v.lo;
      if (peek_kw("init")) {
        lx_.take();
        v.init = parse_int();
      }
      a.vars.push_back(v);
      expect(Tok::Semi, "';'");
    }
    lx_.take();
  }

  void parse_actions(Automaton& a) {
    expect(Tok::LBrace, "'{'");
    while (lx_.peek().kind != Tok::RBrace) {
      Token t = lx_.peek();
      ActionDecl d;
      d.name = expect_id();
      if (a.find_action(d.name)) throw ParseError(t.line, t.col, "duplicate action '" + d.name + "'");
      std::string kind = expect_id();
      if (kind == "unicast") d.kind = ActionKind::Unicast;
      else if (kind == "broadcast") d.kind = ActionKind::Broadcast;
      else fail("action kind must be 'unicast' or 'broadcast'");
      std::string dir = expect_id();
      if (dir == "in") d.dir = Dir::In;
      else if (dir == "out") d.dir = Dir::Out;
      else fail("action direction must be 'in' or 'out'");
      a.actions.push_back(d);
      expect(Tok::Semi, "';'");
    }
    lx_.take();
  }

  void parse_locations(Automaton& a) {
    expect(Tok::LBrace, "'{'");
    while (lx_.peek().kind != Tok::RBrace) {
      Token t = lx_.peek();
      Location l;
      l.name = expect_id();
      if (a.find_location(l.name))
        throw ParseError(t.line, t.col, "duplicate location '" + l.name + "'");
      expect(Tok::LBrace, "'{'");
      while (lx_.peek().kind != Tok::RBrace) {
        std::string item = expect_id();
        if (item == "initial") {
          if (!a.initial.empty())
            fail("initial location already declared ('" + a.initial + "')");
          a.initial = l.name;
        } else if (item == "error") {
          l.error = true;
        } else if (item == "invariant") {
          l.invariant = parse_constraint();
        } else if (item == "rate") {
          std::string clk = expect_id();
          std::int64_t r = parse_int();
          l.rates[clk] = static_cast<int>(r);
        } else {
          fail("unknown location item '" + item + "'");
        }
        expect(Tok::Semi, "';'");
      }
      lx_.take();
      a.locations.push_back(std::move(l));
    }
    lx_.take();
  }

  void parse_edges(Automaton& a) {
    expect(Tok::LBrace, "'{'");
    while (lx_.peek().kind != Tok::RBrace) {
      Edge e;
      e.source = expect_id();
      expect(Tok::Arrow, "'->'");
      e.target = expect_id();
      expect(Tok::LBrace, "'{'");
      while (lx_.peek().kind != Tok::RBrace) {
        std::string item = expect_id();
        if (item == "guard") {
          e.guard = parse_constraint();
        } else if (item == "sync") {
          e.sync = expect_id();
          if (lx_.peek().kind == Tok::Bang || lx_.peek().kind == Tok::Query) lx_.take();
        } else if (item == "update") {
          do {
            e.update.entries.push_back(parse_update_entry());
          } while (lx_.peek().kind == Tok::Comma && (lx_.take(), true));
        } else {
          fail("unknown edge item '" + item + "'");
        }
        expect(Tok::Semi, "';'");
      }
      lx_.take();
      a.edges.push_back(std::move(e));
    }
    lx_.take();
  }

  Constraint parse_constraint() {
    Constraint c;
    c.atoms.push_back(parse_atom());
    while (lx_.peek().kind == Tok::AndAnd) {
      lx_.take();
      c.atoms.push_back(parse_atom());
    }
    return c;
  }

  CmpOp parse_cmp() {
    switch (lx_.take().kind) {
      case Tok::Lt: return CmpOp::Lt;
      case Tok::Le: return CmpOp::Le;
      case Tok::Eq: return CmpOp::Eq;
      case Tok::Ge: return CmpOp::Ge;
      case Tok::Gt: return CmpOp::Gt;
      default: fail("expected comparison operator");
    }
  }

  // Syntactic shape only; clock vs var resolution happens in validate()/
  // semantics. `x - y op n` is a clock difference, `x op n` is clock or var.
  ConstraintAtom parse_atom() {
    ConstraintAtom atom;
    atom.lhs = expect_id();
    if (lx_.peek().kind == Tok::Minus) {
      lx_.take();
      atom.kind = ConstraintAtom::Kind::ClockDiffCmp;
      atom.rhs_clock = expect_id();
      atom.op = parse_cmp();
      atom.time_bound = parse_number();
      return atom;
    }
    atom.op = parse_cmp();
    Token t = lx_.peek();
    TimeVal v = parse_number();
    atom.kind = ConstraintAtom::Kind::ClockCmp;  // VarCmp resolved against declarations
    atom.time_bound = v;
    atom.int_bound = v.den == 1 ? v.num : 0;
    (void)t;
    return atom;
  }

  UpdateEntry parse_update_entry() {
    UpdateEntry u;
    u.target = expect_id();
    expect(Tok::Eq, "'='");
    if (lx_.peek().kind == Tok::Id) {
      Token t = lx_.peek();
      std::string rhs = expect_id();
      if (rhs != u.target)
        throw ParseError(t.line, t.col, "increments must have the form v = v + n");
      u.kind = UpdateEntry::Kind::VarAdd;
      bool minus = false;
      if (lx_.peek().kind == Tok::Plus) lx_.take();
      else if (lx_.peek().kind == Tok::Minus) { lx_.take(); minus = true; }
      else fail("expected '+' or '-'");
      u.value = parse_int();
      if (minus) u.value = -u.value;
      return u;
    }
    Token t = lx_.peek();
    std::int64_t v = parse_int();
    // Shape-wise this is either a clock reset (v must be 0) or a var set;
    // resolved against declarations downstream. Store both faithfully.
    u.kind = UpdateEntry::Kind::VarSet;
    u.value = v;
    (void)t;
    return u;
  }

  // --- system ---

  TimeVal parse_interval_lo(TimeVal& hi) {
    expect(Tok::LBracket, "'['");
    TimeVal lo = parse_number();
    expect(Tok::Comma, "','");
    hi = parse_number();
    expect(Tok::RBracket, "']'");
    return lo;
  }

  SystemConfig parse_system() {
    SystemConfig cfg;
    cfg.name = expect_id();
    expect(Tok::LBrace, "'{'");
    while (lx_.peek().kind != Tok::RBrace) {
      std::string sec = expect_id();
      if (sec == "time-quantum-ms") {
        cfg.quantum_ms = parse_number();
        expect(Tok::Semi, "';'");
      } else if (sec == "major-frame") {
        cfg.major_frame = parse_number();
        expect(Tok::Semi, "';'");
      } else if (sec == "modules") {
        parse_modules(cfg);
      } else if (sec == "partitions") {
        expect(Tok::LBrace, "'{'");
        while (lx_.peek().kind != Tok::RBrace) {
          Token t = lx_.peek();
          std::string p = expect_id();
          for (const auto& q : cfg.partitions)
            if (q == p) throw ParseError(t.line, t.col, "duplicate partition '" + p + "'");
          cfg.partitions.push_back(p);
          expect(Tok::Semi, "';'");
        }
        lx_.take();
      } else if (sec == "schedule") {
        expect(Tok::LBrace, "'{'");
        while (lx_.peek().kind != Tok::RBrace) {
          expect_kw("window");
          ScheduleWindow w;
          w.partition = expect_id();
          expect_kw("offset");
          w.offset = parse_number();
          expect_kw("duration");
          w.duration = parse_number();
          cfg.schedule.push_back(w);
          expect(Tok::Semi, "';'");
        }
        lx_.take();
      } else if (sec == "tasks") {
        expect(Tok::LBrace, "'{'");
        while (lx_.peek().kind != Tok::RBrace) cfg.tasks.push_back(parse_task(cfg));
        lx_.take();
      } else if (sec == "ports") {
        expect(Tok::LBrace, "'{'");
        while (lx_.peek().kind != Tok::RBrace) cfg.ports.push_back(parse_port(cfg));
        lx_.take();
      } else if (sec == "virtual-links") {
        expect(Tok::LBrace, "'{'");
        while (lx_.peek().kind != Tok::RBrace) cfg.vlinks.push_back(parse_vlink(cfg));
        lx_.take();
      } else if (sec == "resources") {
        expect(Tok::LBrace, "'{'");
        while (lx_.peek().kind != Tok::RBrace) {
          ResourceSpec r;
          r.id = expect_id();
          expect_kw("partition");
          r.partition = expect_id();
          cfg.resources.push_back(r);
          expect(Tok::Semi, "';'");
        }
        lx_.take();
      } else {
        fail("unknown system section '" + sec + "'");
      }
    }
    lx_.take();
    return cfg;
  }

  void parse_modules(SystemConfig& cfg) {
    expect(Tok::LBrace, "'{'");
    while (lx_.peek().kind != Tok::RBrace) {
      ModuleSpec m;
      m.id = expect_id();
      expect(Tok::LBrace, "'{'");
      expect_kw("partitions");
      m.partitions.push_back(expect_id());
      while (lx_.peek().kind == Tok::Comma) {
        lx_.take();
        m.partitions.push_back(expect_id());
      }
      expect(Tok::Semi, "';'");
      expect(Tok::RBrace, "'}'");
      cfg.modules.push_back(std::move(m));
    }
    lx_.take();
  }

  TaskSpec parse_task(const SystemConfig& cfg) {
    Token t0 = lx_.peek();
    TaskSpec t;
    t.id = expect_id();
    for (const auto& other : cfg.tasks)
      if (other.id == t.id) throw ParseError(t0.line, t0.col, "duplicate task '" + t.id + "'");
    expect(Tok::LBrace, "'{'");
    while (lx_.peek().kind != Tok::RBrace) {
      std::string item = expect_id();
      if (item == "partition") t.partition = expect_id();
      else if (item == "kind") {
        std::string k = expect_id();
        if (k == "periodic") t.sporadic = false;
        else if (k == "sporadic") t.sporadic = true;
        else fail("task kind must be 'periodic' or 'sporadic'");
      } else if (item == "period" || item == "separation") {
        t.period = parse_number();
      } else if (item == "deadline") {
        t.deadline = parse_number();
      } else if (item == "priority") {
        t.priority = parse_int();
      } else if (item == "offset") {
        t.offset = parse_number();
      } else if (item == "commands") {
        expect(Tok::LBrace, "'{'");
        while (lx_.peek().kind != Tok::RBrace) {
          CommandSpec c;
          std::string kind = expect_id();
          if (kind == "compute") {
            c.kind = CommandSpec::Kind::Compute;
            c.bcet = parse_interval_lo(c.wcet);
          } else if (kind == "send") {
            c.kind = CommandSpec::Kind::Send;
            c.ref = expect_id();
          } else if (kind == "receive") {
            c.kind = CommandSpec::Kind::Receive;
            c.ref = expect_id();
          } else if (kind == "lock") {
            c.kind = CommandSpec::Kind::Lock;
            c.ref = expect_id();
          } else if (kind == "unlock") {
            c.kind = CommandSpec::Kind::Unlock;
            c.ref = expect_id();
          } else {
            fail("unknown command '" + kind + "'");
          }
          t.commands.push_back(std::move(c));
          expect(Tok::Semi, "';'");
        }
        lx_.take();
        continue;
      } else {
        fail("unknown task item '" + item + "'");
      }
      expect(Tok::Semi, "';'");
    }
    lx_.take();
    return t;
  }

  PortSpec parse_port(const SystemConfig& cfg) {
    Token t0 = lx_.peek();
    PortSpec p;
    p.id = expect_id();
    if (cfg.find_port(p.id)) throw ParseError(t0.line, t0.col, "duplicate port '" + p.id + "'");
    expect(Tok::LBrace, "'{'");
    while (lx_.peek().kind != Tok::RBrace) {
      std::string item = expect_id();
      if (item == "partition") p.partition = expect_id();
      else if (item == "kind") {
        std::string k = expect_id();
        if (k == "sampling") p.queuing = false;
        else if (k == "queuing") p.queuing = true;
        else fail("port kind must be 'sampling' or 'queuing'");
      } else if (item == "direction") {
        std::string d = expect_id();
        if (d == "source") p.destination = false;
        else if (d == "destination") p.destination = true;
        else fail("port direction must be 'source' or 'destination'");
      } else if (item == "message") {
        p.message = expect_id();
      } else if (item == "refresh") {
        p.refresh = parse_number();
      } else if (item == "capacity") {
        p.capacity = parse_int();
      } else {
        fail("unknown port item '" + item + "'");
      }
      expect(Tok::Semi, "';'");
    }
    lx_.take();
    return p;
  }

  VirtualLinkSpec parse_vlink(const SystemConfig& cfg) {
    Token t0 = lx_.peek();
    VirtualLinkSpec v;
    v.id = expect_id();
    for (const auto& other : cfg.vlinks)
      if (other.id == v.id) throw ParseError(t0.line, t0.col, "duplicate virtual link '" + v.id + "'");
    expect(Tok::LBrace, "'{'");
    while (lx_.peek().kind != Tok::RBrace) {
      std::string item = expect_id();
      if (item == "message") v.message = expect_id();
      else if (item == "from") v.source = expect_id();
      else if (item == "to") {
        v.destinations.push_back(expect_id());
        while (lx_.peek().kind == Tok::Comma) {
          lx_.take();
          v.destinations.push_back(expect_id());
        }
      } else if (item == "tx-udpip") {
        v.tx_lo = parse_interval_lo(v.tx_hi);
      } else if (item == "vl-transit") {
        v.vl_lo = parse_interval_lo(v.vl_hi);
      } else if (item == "rx-udpip") {
        v.rx_lo = parse_interval_lo(v.rx_hi);
      } else {
        fail("unknown virtual-link item '" + item + "'");
      }
      expect(Tok::Semi, "';'");
    }
    lx_.take();
    return v;
  }

  Lexer lx_;
};

}  // namespace

ParsedDocument parse_document(const std::string& text) {
  return Parser(text).parse();
}

ParsedDocument parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_document(ss.str());
}

// --- serialization ---

namespace {

std::string atom_str(const ConstraintAtom& a) {
  switch (a.kind) {
    case ConstraintAtom::Kind::ClockCmp:
      return a.lhs + " " + cmp_str(a.op) + " " + a.time_bound.str();
    case ConstraintAtom::Kind::ClockDiffCmp:
      return a.lhs + " - " + a.rhs_clock + " " + cmp_str(a.op) + " " + a.time_bound.str();
    case ConstraintAtom::Kind::VarCmp:
      return a.lhs + " " + cmp_str(a.op) + " " + std::to_string(a.int_bound);
  }
  return "";
}

std::string constraint_str(const Constraint& c) {
  std::string s;
  for (size_t i = 0; i < c.atoms.size(); ++i) {
    if (i) s += " && ";
    s += atom_str(c.atoms[i]);
  }
  return s;
}

std::string update_str(const UpdateEntry& u) {
  switch (u.kind) {
    case UpdateEntry::Kind::ClockReset:
      return u.target + " = 0";
    case UpdateEntry::Kind::VarSet:
      return u.target + " = " + std::to_string(u.value);
    case UpdateEntry::Kind::VarAdd:
      return u.target + " = " + u.target + (u.value < 0 ? " - " : " + ") +
             std::to_string(u.value < 0 ? -u.value : u.value);
  }
  return "";
}

std::string interval_str(const TimeVal& lo, const TimeVal& hi) {
  return "[" + lo.str() + ", " + hi.str() + "]";
}

}  // namespace

std::string serialize(const Automaton& a) {
  std::ostringstream o;
  o << "automaton " << a.name << " {\n";
  if (!a.clocks.empty()) {
    o << "  clocks {";
    for (const auto& c : a.clocks) o << " " << c << ";";
    o << " }\n";
  }
  if (!a.vars.empty()) {
    o << "  vars {";
    for (const auto& v : a.vars)
      o << " " << v.name << " range " << v.lo << ".." << v.hi << " init " << v.init << ";";
    o << " }\n";
  }
  if (!a.actions.empty()) {
    o << "  actions {";
    for (const auto& act : a.actions)
      o << " " << act.name << " " << (act.kind == ActionKind::Unicast ? "unicast" : "broadcast")
        << " " << (act.dir == Dir::In ? "in" : "out") << ";";
    o << " }\n";
  }
  o << "  locations {\n";
  for (const auto& l : a.locations) {
    o << "    " << l.name << " {";
    if (l.name == a.initial) o << " initial;";
    if (l.error) o << " error;";
    if (!l.invariant.trivially_true()) o << " invariant " << constraint_str(l.invariant) << ";";
    for (const auto& [clk, r] : l.rates) o << " rate " << clk << " " << r << ";";
    o << " }\n";
  }
  o << "  }\n";
  if (!a.edges.empty()) {
    o << "  edges {\n";
    for (const auto& e : a.edges) {
      o << "    " << e.source << " -> " << e.target << " {";
      if (!e.guard.trivially_true()) o << " guard " << constraint_str(e.guard) << ";";
      if (!e.sync.empty()) {
        const ActionDecl* d = a.find_action(e.sync);
        o << " sync " << e.sync << (d && d->dir == Dir::In ? "?" : "!") << ";";
      }
      if (!e.update.entries.empty()) {
        o << " update ";
        for (size_t i = 0; i < e.update.entries.size(); ++i) {
          if (i) o << ", ";
          o << update_str(e.update.entries[i]);
        }
        o << ";";
      }
      o << " }\n";
    }
    o << "  }\n";
  }
  o << "}\n";
  return o.str();
}

std::string serialize(const SystemConfig& cfg) {
  std::ostringstream o;
  o << "system " << cfg.name << " {\n";
  o << "  time-quantum-ms " << cfg.quantum_ms.str() << ";\n";
  o << "  major-frame " << cfg.major_frame.str() << ";\n";
  if (!cfg.modules.empty()) {
    o << "  modules {\n";
    for (const auto& m : cfg.modules) {
      o << "    " << m.id << " { partitions ";
      for (size_t i = 0; i < m.partitions.size(); ++i) {
        if (i) o << ", ";
        o << m.partitions[i];
      }
      o << "; }\n";
    }
    o << "  }\n";
  }
  if (!cfg.partitions.empty()) {
    o << "  partitions {";
    for (const auto& p : cfg.partitions) o << " " << p << ";";
    o << " }\n";
  }
  if (!cfg.schedule.empty()) {
    o << "  schedule {\n";
    for (const auto& w : cfg.schedule)
      o << "    window " << w.partition << " offset " << w.offset.str() << " duration "
        << w.duration.str() << ";\n";
    o << "  }\n";
  }
  if (!cfg.tasks.empty()) {
    o << "  tasks {\n";
    for (const auto& t : cfg.tasks) {
      o << "    " << t.id << " {\n";
      o << "      partition " << t.partition << "; kind " << (t.sporadic ? "sporadic" : "periodic")
        << "; " << (t.sporadic ? "separation " : "period ") << t.period.str() << "; deadline "
        << t.deadline.str() << "; priority " << t.priority << "; offset " << t.offset.str()
        << ";\n";
      o << "      commands {";
      for (const auto& c : t.commands) {
        switch (c.kind) {
          case CommandSpec::Kind::Compute:
            o << " compute " << interval_str(c.bcet, c.wcet) << ";";
            break;
          case CommandSpec::Kind::Send: o << " send " << c.ref << ";"; break;
          case CommandSpec::Kind::Receive: o << " receive " << c.ref << ";"; break;
          case CommandSpec::Kind::Lock: o << " lock " << c.ref << ";"; break;
          case CommandSpec::Kind::Unlock: o << " unlock " << c.ref << ";"; break;
        }
      }
      o << " }\n    }\n";
    }
    o << "  }\n";
  }
  if (!cfg.ports.empty()) {
    o << "  ports {\n";
    for (const auto& p : cfg.ports) {
      o << "    " << p.id << " { partition " << p.partition << "; kind "
        << (p.queuing ? "queuing" : "sampling") << "; direction "
        << (p.destination ? "destination" : "source") << "; message " << p.message << ";";
      if (!p.queuing) o << " refresh " << p.refresh.str() << ";";
      if (p.queuing) o << " capacity " << p.capacity << ";";
      o << " }\n";
    }
    o << "  }\n";
  }
  if (!cfg.vlinks.empty()) {
    o << "  virtual-links {\n";
    for (const auto& v : cfg.vlinks) {
      o << "    " << v.id << " { message " << v.message << "; from " << v.source << "; to ";
      for (size_t i = 0; i < v.destinations.size(); ++i) {
        if (i) o << ", ";
        o << v.destinations[i];
      }
      o << "; tx-udpip " << interval_str(v.tx_lo, v.tx_hi) << "; vl-transit "
        << interval_str(v.vl_lo, v.vl_hi) << "; rx-udpip " << interval_str(v.rx_lo, v.rx_hi)
        << "; }\n";
    }
    o << "  }\n";
  }
  if (!cfg.resources.empty()) {
    o << "  resources {\n";
    for (const auto& r : cfg.resources)
      o << "    " << r.id << " partition " << r.partition << ";\n";
    o << "  }\n";
  }
  o << "}\n";
  return o.str();
}

}  // namespace dima
