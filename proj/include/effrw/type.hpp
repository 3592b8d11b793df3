#pragma once

#include <memory>
#include <string>

namespace effrw {

/// Simple types: base names, the effect type E(T) and arrows S -> T.
///
/// `Meta` is an inference variable. It never appears in declared
/// signatures; the typechecker produces it for types left unconstrained
/// (an unannotated lambda, a nullary effect, ...).
class Type {
public:
  enum class Kind { Base, Eff, Arrow, Meta };

  static Type base(std::string name);
  static Type eff(Type inner);
  static Type arrow(Type dom, Type cod);
  static Type meta(int id);

  Kind kind() const noexcept { return node_->kind; }
  bool is_base() const noexcept { return kind() == Kind::Base; }
  bool is_eff() const noexcept { return kind() == Kind::Eff; }
  bool is_arrow() const noexcept { return kind() == Kind::Arrow; }
  bool is_meta() const noexcept { return kind() == Kind::Meta; }

  const std::string& name() const noexcept { return node_->name; }
  int meta_id() const noexcept { return node_->meta; }
  /// Payload of Eff, domain of Arrow.
  const Type& first() const noexcept { return *node_->a; }
  /// Codomain of Arrow.
  const Type& second() const noexcept { return *node_->b; }

  friend bool operator==(const Type& x, const Type& y);

private:
  struct Node {
    Kind kind;
    std::string name;
    int meta = -1;
    std::unique_ptr<Type> a, b;
  };
  explicit Type(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

/// `B`, `(E B)`, `(-> S T)`, metas as `?0`, `?1`, ...
std::string to_string(const Type& t);

} // namespace effrw
