#include "effrw/type.hpp"

namespace effrw {

Type Type::base(std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Base;
  n->name = std::move(name);
  return Type(std::move(n));
}

Type Type::eff(Type inner) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Eff;
  n->a = std::make_unique<Type>(std::move(inner));
  return Type(std::move(n));
}

Type Type::arrow(Type dom, Type cod) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Arrow;
  n->a = std::make_unique<Type>(std::move(dom));
  n->b = std::make_unique<Type>(std::move(cod));
  return Type(std::move(n));
}

Type Type::meta(int id) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Meta;
  n->meta = id;
  return Type(std::move(n));
}

bool operator==(const Type& x, const Type& y) {
  if (x.node_ == y.node_) return true;
  if (x.kind() != y.kind()) return false;
  switch (x.kind()) {
  case Type::Kind::Base: return x.name() == y.name();
  case Type::Kind::Meta: return x.meta_id() == y.meta_id();
  case Type::Kind::Eff: return x.first() == y.first();
  case Type::Kind::Arrow: return x.first() == y.first() && x.second() == y.second();
  }
  return false;
}

std::string to_string(const Type& t) {
  switch (t.kind()) {
  case Type::Kind::Base: return t.name();
  case Type::Kind::Meta: return "?" + std::to_string(t.meta_id());
  case Type::Kind::Eff: return "(E " + to_string(t.first()) + ")";
  case Type::Kind::Arrow: return "(-> " + to_string(t.first()) + " " + to_string(t.second()) + ")";
  }
  return {};
}

} // namespace effrw
