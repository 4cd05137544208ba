#include <sstream>

#include "mucp/syntax.hpp"

namespace mucp {

namespace {

bool additive(Connective op) { return op == Connective::Plus || op == Connective::With; }

class TypePrinter {
 public:
  std::string run(const Type& t) {
    std::string out;
    print(t, out);
    return out;
  }

 private:
  void print(const Type& t, std::string& out) {
    switch (t.kind()) {
      case Type::Kind::Var: {
        int i = t.index();
        if (i < static_cast<int>(env_.size())) {
          out += env_[env_.size() - 1 - static_cast<std::size_t>(i)];
        } else {
          out += "?" + std::to_string(i);
        }
        return;
      }
      case Type::Kind::Const:
        out += to_string(t.constant());
        return;
      case Type::Kind::Fix: {
        std::string base = t.name().empty() ? "X" : t.name();
        std::string var = base;
        for (int k = 1; in_scope(var); ++k) var = base + std::to_string(k);
        out += to_string(t.binder()) + " " + var + ".";
        env_.push_back(var);
        Type body = t.body();
        if (body.is_bin()) {
          out += "(";
          print(body, out);
          out += ")";
        } else {
          print(body, out);
        }
        env_.pop_back();
        return;
      }
      case Type::Kind::Bin: {
        operand(t.left(), t.connective(), out);
        out += " " + to_string(t.connective()) + " ";
        operand(t.right(), t.connective(), out);
        return;
      }
    }
  }

  // Binary operands are parenthesised except a multiplicative under an
  // additive; binders always are, since they extend to the right.
  void operand(const Type& t, Connective parent, std::string& out) {
    bool bare = !t.is_fix() && (!t.is_bin() || (additive(parent) && !additive(t.connective())));
    if (!bare) out += "(";
    print(t, out);
    if (!bare) out += ")";
  }

  bool in_scope(const std::string& v) const {
    for (const auto& e : env_) {
      if (e == v) return true;
    }
    return false;
  }

  std::vector<std::string> env_;
};

void print_process(const Process& p, std::string& out) {
  if (auto* c = p.as<Call>()) {
    out += c->name + "(";
    for (std::size_t i = 0; i < c->args.size(); ++i) {
      if (i) out += ", ";
      out += c->args[i];
    }
    out += ")";
  } else if (auto* f = p.as<Fail>()) {
    out += "fail " + f->channel;
  } else if (auto* c = p.as<Close>()) {
    out += "close " + c->channel;
  } else if (auto* w = p.as<Wait>()) {
    out += "wait " + w->channel + "; ";
    print_process(w->cont, out);
  } else if (auto* s = p.as<Send>()) {
    out += s->channel + "!(" + s->bound + "){";
    print_process(s->left, out);
    out += "}{";
    print_process(s->right, out);
    out += "}";
  } else if (auto* r = p.as<Receive>()) {
    out += r->channel + "?(" + r->bound + "); ";
    print_process(r->cont, out);
  } else if (auto* s = p.as<Select>()) {
    out += s->channel + (s->branch == 0 ? ".inl; " : ".inr; ");
    print_process(s->cont, out);
  } else if (auto* c = p.as<Case>()) {
    out += "case " + c->channel + " { ";
    print_process(c->left, out);
    out += " | ";
    print_process(c->right, out);
    out += " }";
  } else if (auto* c = p.as<Cut>()) {
    out += "new " + c->channel;
    if (c->left_type && c->right_type) {
      out += " : " + pretty(*c->left_type) + " | " + pretty(*c->right_type);
    }
    out += " { ";
    print_process(c->left, out);
    out += " | ";
    print_process(c->right, out);
    out += " }";
  }
}

std::string print_params(const std::vector<Param>& ps) {
  std::string out = "(";
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (i) out += ", ";
    out += ps[i].channel + " : " + pretty(ps[i].type);
  }
  return out + ")";
}

}  // namespace

std::string pretty(const Type& t) { return TypePrinter().run(t); }

std::string pretty(const Process& p) {
  std::string out;
  print_process(p, out);
  return out;
}

std::string pretty(const SourceProgram& p) {
  std::ostringstream out;
  for (const auto& [name, t] : p.type_aliases) out << "type " << name << " = " << pretty(t) << "\n";
  if (!p.type_aliases.empty()) out << "\n";
  for (const auto& d : p.definitions) {
    out << "def " << d.name << print_params(d.params) << " =\n  " << pretty(d.body) << "\n\n";
  }
  if (p.main) {
    out << "main";
    if (!p.main->params.empty()) out << print_params(p.main->params);
    out << " =\n  " << pretty(p.main->body) << "\n";
  }
  return out.str();
}

}  // namespace mucp
