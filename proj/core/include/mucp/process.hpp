#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "mucp/diagnostic.hpp"
#include "mucp/type.hpp"

namespace mucp {

using Channel = std::string;

struct ProcessNode;
struct Call;
struct Fail;
struct Close;
struct Wait;
struct Send;
struct Receive;
struct Select;
struct Case;
struct Cut;

template <class T>
concept ProcessForm = std::is_same_v<T, Call> || std::is_same_v<T, Fail> || std::is_same_v<T, Close> ||
                      std::is_same_v<T, Wait> || std::is_same_v<T, Send> || std::is_same_v<T, Receive> ||
                      std::is_same_v<T, Select> || std::is_same_v<T, Case> || std::is_same_v<T, Cut>;

/// Immutable process term; copies share structure.
class Process {
 public:
  template <ProcessForm T>
  Process(T node);  // NOLINT(google-explicit-constructor)

  template <class T>
  const T* as() const;
  template <class T>
  bool is() const {
    return as<T>() != nullptr;
  }

  const ProcessNode& node() const { return *node_; }
  const void* identity() const { return node_.get(); }

 private:
  std::shared_ptr<const ProcessNode> node_;
};

/// A(x⃗)
struct Call {
  std::string name;
  std::vector<Channel> args;
};
/// fail x
struct Fail {
  Channel channel;
};
/// close x
struct Close {
  Channel channel;
};
/// wait x; P
struct Wait {
  Channel channel;
  Process cont;
};
/// x!(y){P}{Q}: y is bound in P only.
struct Send {
  Channel channel;
  Channel bound;
  Process left;
  Process right;
};
/// x?(y); P
struct Receive {
  Channel channel;
  Channel bound;
  Process cont;
};
/// x.inl; P (branch 0) or x.inr; P (branch 1)
struct Select {
  Channel channel;
  int branch = 0;
  Process cont;
};
/// case x { P | Q }
struct Case {
  Channel channel;
  Process left;
  Process right;
};
/// new x : A | B { P | Q }: P uses x at A, Q uses x at B. Cuts created at
/// run time carry no types.
struct Cut {
  Channel channel;
  std::optional<Type> left_type;
  std::optional<Type> right_type;
  Process left;
  Process right;
};

struct ProcessNode {
  std::variant<Call, Fail, Close, Wait, Send, Receive, Select, Case, Cut> value;
};

template <ProcessForm T>
Process::Process(T node) : node_(std::make_shared<const ProcessNode>(ProcessNode{std::move(node)})) {}

template <class T>
const T* Process::as() const {
  return std::get_if<T>(&node_->value);
}

/// Structural equality; types compared up to bound-variable names.
bool operator==(const Process& a, const Process& b);
inline bool operator!=(const Process& a, const Process& b) { return !(a == b); }

/// Channel that the head action of p acts on; empty for calls and cuts.
std::optional<Channel> subject(const Process& p);

std::set<Channel> free_channels(const Process& p);

/// Every channel name occurring in p, free or bound.
std::set<Channel> all_channels(const Process& p);

/// Process names invoked anywhere in p.
std::set<std::string> invoked(const Process& p);

/// Replaces free channels according to `renaming`. Bound channels that would
/// capture a replacement are renamed using `fresh`, which must return names
/// not occurring anywhere else.
Process rename_channels(const Process& p, const std::map<Channel, Channel>& renaming,
                        const std::function<Channel(const Channel&)>& fresh);

/// Convenience overload: fresh names are generated by suffixing `'k`.
Process rename_channels(const Process& p, const std::map<Channel, Channel>& renaming);

struct Param {
  Channel channel;
  Type type;
};

struct Definition {
  std::string name;
  std::vector<Param> params;
  Process body;
  std::optional<SourceSpan> span;
};

struct MainDecl {
  std::vector<Param> params;
  Process body;
  std::optional<SourceSpan> span;
};

struct SourceProgram {
  std::vector<std::pair<std::string, Type>> type_aliases;
  std::vector<Definition> definitions;
  std::optional<MainDecl> main;

  const Definition* find(const std::string& name) const;
};

}  // namespace mucp
