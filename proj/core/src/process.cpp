#include "mucp/process.hpp"

namespace mucp {

namespace {

template <class... Fs>
struct overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

bool same_type(const std::optional<Type>& a, const std::optional<Type>& b) {
  if (a.has_value() != b.has_value()) return false;
  return !a || *a == *b;
}

void collect_free(const Process& p, std::set<Channel>& bound_above, std::set<Channel>& out) {
  auto use = [&](const Channel& c) {
    if (!bound_above.count(c)) out.insert(c);
  };
  auto under = [&](const Channel& b, const Process& q) {
    bool fresh = bound_above.insert(b).second;
    collect_free(q, bound_above, out);
    if (fresh) bound_above.erase(b);
  };
  std::visit(overloaded{
                 [&](const Call& c) {
                   for (const auto& a : c.args) use(a);
                 },
                 [&](const Fail& f) { use(f.channel); },
                 [&](const Close& c) { use(c.channel); },
                 [&](const Wait& w) {
                   use(w.channel);
                   collect_free(w.cont, bound_above, out);
                 },
                 [&](const Send& s) {
                   use(s.channel);
                   under(s.bound, s.left);
                   collect_free(s.right, bound_above, out);
                 },
                 [&](const Receive& r) {
                   use(r.channel);
                   under(r.bound, r.cont);
                 },
                 [&](const Select& s) {
                   use(s.channel);
                   collect_free(s.cont, bound_above, out);
                 },
                 [&](const Case& c) {
                   use(c.channel);
                   collect_free(c.left, bound_above, out);
                   collect_free(c.right, bound_above, out);
                 },
                 [&](const Cut& c) {
                   under(c.channel, c.left);
                   under(c.channel, c.right);
                 },
             },
             p.node().value);
}

Process rename(const Process& p, const std::map<Channel, Channel>& m,
               const std::function<Channel(const Channel&)>& fresh) {
  auto map = [&](const Channel& c) {
    auto it = m.find(c);
    return it == m.end() ? c : it->second;
  };
  // Renaming for the scope of binder b: b shadows any mapping of b, and is
  // itself renamed when it would capture a replacement.
  auto enter = [&](const Channel& b, Channel& new_b) {
    std::map<Channel, Channel> inner = m;
    inner.erase(b);
    new_b = b;
    for (const auto& [from, to] : inner) {
      if (to == b) {
        new_b = fresh(b);
        inner[b] = new_b;
        break;
      }
    }
    return inner;
  };
  return std::visit(
      overloaded{
          [&](const Call& c) -> Process {
            Call out{c.name, {}};
            for (const auto& a : c.args) out.args.push_back(map(a));
            return out;
          },
          [&](const Fail& f) -> Process { return Fail{map(f.channel)}; },
          [&](const Close& c) -> Process { return Close{map(c.channel)}; },
          [&](const Wait& w) -> Process { return Wait{map(w.channel), rename(w.cont, m, fresh)}; },
          [&](const Send& s) -> Process {
            Channel b;
            auto inner = enter(s.bound, b);
            return Send{map(s.channel), b, rename(s.left, inner, fresh), rename(s.right, m, fresh)};
          },
          [&](const Receive& r) -> Process {
            Channel b;
            auto inner = enter(r.bound, b);
            return Receive{map(r.channel), b, rename(r.cont, inner, fresh)};
          },
          [&](const Select& s) -> Process { return Select{map(s.channel), s.branch, rename(s.cont, m, fresh)}; },
          [&](const Case& c) -> Process {
            return Case{map(c.channel), rename(c.left, m, fresh), rename(c.right, m, fresh)};
          },
          [&](const Cut& c) -> Process {
            Channel b;
            auto inner = enter(c.channel, b);
            return Cut{b, c.left_type, c.right_type, rename(c.left, inner, fresh), rename(c.right, inner, fresh)};
          },
      },
      p.node().value);
}

}  // namespace

bool operator==(const Process& a, const Process& b) {
  if (a.identity() == b.identity()) return true;
  if (a.node().value.index() != b.node().value.index()) return false;
  return std::visit(
      overloaded{
          [&](const Call& x) {
            const auto& y = *b.as<Call>();
            return x.name == y.name && x.args == y.args;
          },
          [&](const Fail& x) { return x.channel == b.as<Fail>()->channel; },
          [&](const Close& x) { return x.channel == b.as<Close>()->channel; },
          [&](const Wait& x) {
            const auto& y = *b.as<Wait>();
            return x.channel == y.channel && x.cont == y.cont;
          },
          [&](const Send& x) {
            const auto& y = *b.as<Send>();
            return x.channel == y.channel && x.bound == y.bound && x.left == y.left && x.right == y.right;
          },
          [&](const Receive& x) {
            const auto& y = *b.as<Receive>();
            return x.channel == y.channel && x.bound == y.bound && x.cont == y.cont;
          },
          [&](const Select& x) {
            const auto& y = *b.as<Select>();
            return x.channel == y.channel && x.branch == y.branch && x.cont == y.cont;
          },
          [&](const Case& x) {
            const auto& y = *b.as<Case>();
            return x.channel == y.channel && x.left == y.left && x.right == y.right;
          },
          [&](const Cut& x) {
            const auto& y = *b.as<Cut>();
            return x.channel == y.channel && same_type(x.left_type, y.left_type) &&
                   same_type(x.right_type, y.right_type) && x.left == y.left && x.right == y.right;
          },
      },
      a.node().value);
}

std::optional<Channel> subject(const Process& p) {
  return std::visit(overloaded{
                        [](const Call&) -> std::optional<Channel> { return std::nullopt; },
                        [](const Cut&) -> std::optional<Channel> { return std::nullopt; },
                        [](const auto& n) -> std::optional<Channel> { return n.channel; },
                    },
                    p.node().value);
}

std::set<Channel> free_channels(const Process& p) {
  std::set<Channel> bound, out;
  collect_free(p, bound, out);
  return out;
}

std::set<Channel> all_channels(const Process& p) {
  std::set<Channel> out;
  std::function<void(const Process&)> walk = [&](const Process& q) {
    std::visit(overloaded{
                   [&](const Call& c) { out.insert(c.args.begin(), c.args.end()); },
                   [&](const Fail& f) { out.insert(f.channel); },
                   [&](const Close& c) { out.insert(c.channel); },
                   [&](const Wait& w) {
                     out.insert(w.channel);
                     walk(w.cont);
                   },
                   [&](const Send& s) {
                     out.insert(s.channel);
                     out.insert(s.bound);
                     walk(s.left);
                     walk(s.right);
                   },
                   [&](const Receive& r) {
                     out.insert(r.channel);
                     out.insert(r.bound);
                     walk(r.cont);
                   },
                   [&](const Select& s) {
                     out.insert(s.channel);
                     walk(s.cont);
                   },
                   [&](const Case& c) {
                     out.insert(c.channel);
                     walk(c.left);
                     walk(c.right);
                   },
                   [&](const Cut& c) {
                     out.insert(c.channel);
                     walk(c.left);
                     walk(c.right);
                   },
               },
               q.node().value);
  };
  walk(p);
  return out;
}

std::set<std::string> invoked(const Process& p) {
  std::set<std::string> out;
  std::function<void(const Process&)> walk = [&](const Process& q) {
    std::visit(overloaded{
                   [&](const Call& c) { out.insert(c.name); },
                   [&](const Wait& w) { walk(w.cont); },
                   [&](const Send& s) {
                     walk(s.left);
                     walk(s.right);
                   },
                   [&](const Receive& r) { walk(r.cont); },
                   [&](const Select& s) { walk(s.cont); },
                   [&](const Case& c) {
                     walk(c.left);
                     walk(c.right);
                   },
                   [&](const Cut& c) {
                     walk(c.left);
                     walk(c.right);
                   },
                   [](const auto&) {},
               },
               q.node().value);
  };
  walk(p);
  return out;
}

Process rename_channels(const Process& p, const std::map<Channel, Channel>& renaming,
                        const std::function<Channel(const Channel&)>& fresh) {
  return rename(p, renaming, fresh);
}

Process rename_channels(const Process& p, const std::map<Channel, Channel>& renaming) {
  std::set<Channel> taken = all_channels(p);
  for (const auto& [from, to] : renaming) {
    taken.insert(from);
    taken.insert(to);
  }
  int counter = 0;
  auto fresh = [&](const Channel& base) {
    Channel c;
    do {
      c = base + "'" + std::to_string(++counter);
    } while (taken.count(c));
    taken.insert(c);
    return c;
  };
  return rename(p, renaming, fresh);
}

const Definition* SourceProgram::find(const std::string& name) const {
  for (const auto& d : definitions) {
    if (d.name == name) return &d;
  }
  return nullptr;
}

}  // namespace mucp
