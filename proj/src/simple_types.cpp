#include "ealinfer/simple_types.hpp"

#include <functional>

namespace eal {

STPtr st_base() {
    static STPtr o = [] {
        auto t = std::make_shared<SimpleType>();
        t->kind = SimpleType::Kind::Base;
        t->name = "o";
        return t;
    }();
    return o;
}

STPtr st_var(std::string name) {
    auto t = std::make_shared<SimpleType>();
    t->kind = SimpleType::Kind::Var;
    t->name = std::move(name);
    return t;
}

STPtr st_arrow(STPtr left, STPtr right) {
    auto t = std::make_shared<SimpleType>();
    t->kind = SimpleType::Kind::Arrow;
    t->left = std::move(left);
    t->right = std::move(right);
    return t;
}

bool st_eq(const STPtr& a, const STPtr& b) {
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case SimpleType::Kind::Base: return true;
        case SimpleType::Kind::Var: return a->name == b->name;
        case SimpleType::Kind::Arrow:
            return st_eq(a->left, b->left) && st_eq(a->right, b->right);
    }
    return false;
}

std::string st_format(const STPtr& t) {
    if (t->kind != SimpleType::Kind::Arrow) return t->name;
    std::string lhs = st_format(t->left);
    if (t->left->kind == SimpleType::Kind::Arrow) lhs = "(" + lhs + ")";
    return lhs + " -> " + st_format(t->right);
}

namespace {

struct STParser {
    const std::string& src;
    size_t pos = 0;

    void skip_ws() { while (pos < src.size() && src[pos] == ' ') ++pos; }

    STPtr atom() {
        skip_ws();
        if (pos >= src.size()) throw SyntaxError("expected type", pos);
        if (src[pos] == '(') {
            ++pos;
            STPtr t = arrow();
            skip_ws();
            if (pos >= src.size() || src[pos] != ')') throw SyntaxError("unbalanced '('", pos);
            ++pos;
            return t;
        }
        size_t start = pos;
        while (pos < src.size() &&
               ((src[pos] >= 'a' && src[pos] <= 'z') || (src[pos] >= 'A' && src[pos] <= 'Z') ||
                (src[pos] >= '0' && src[pos] <= '9') || src[pos] == '_'))
            ++pos;
        if (pos == start) throw SyntaxError("expected type atom", pos);
        std::string name = src.substr(start, pos - start);
        return name == "o" ? st_base() : st_var(name);
    }

    STPtr arrow() {
        STPtr lhs = atom();
        skip_ws();
        if (pos + 1 < src.size() && src[pos] == '-' && src[pos + 1] == '>') {
            pos += 2;
            return st_arrow(lhs, arrow());
        }
        return lhs;
    }
};

}  // namespace

STPtr parse_simple_type(const std::string& text) {
    STParser p{text};
    STPtr t = p.arrow();
    p.skip_ws();
    if (p.pos != text.size()) throw SyntaxError("trailing input in type", p.pos);
    return t;
}

//--------------------------------------------------------------------------
// Principal types: plain unification over mutable type cells.

namespace {

struct Cell;
using CellPtr = std::shared_ptr<Cell>;

struct Cell {
    // unbound var when !link && !is_arrow
    bool is_arrow = false;
    CellPtr link;  // union-find forward pointer
    CellPtr left, right;
    int id = 0;
};

CellPtr find(CellPtr c) {
    while (c->link) c = c->link;
    return c;
}

bool occurs(const CellPtr& v, CellPtr t) {
    t = find(t);
    if (t == v) return true;
    if (t->is_arrow) return occurs(v, t->left) || occurs(v, t->right);
    return false;
}

void unify(CellPtr a, CellPtr b, const TermPtr& at) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (!a->is_arrow) {
        if (occurs(a, b))
            throw NotSimplyTypable("occurs check failed at subterm " + format(at));
        a->link = b;
        return;
    }
    if (!b->is_arrow) {
        if (occurs(b, a))
            throw NotSimplyTypable("occurs check failed at subterm " + format(at));
        b->link = a;
        return;
    }
    unify(a->left, b->left, at);
    unify(a->right, b->right, at);
}

struct Inferencer {
    int next_id = 0;
    std::map<std::string, CellPtr> env;  // free variables of the whole term

    CellPtr fresh() {
        auto c = std::make_shared<Cell>();
        c->id = next_id++;
        return c;
    }

    struct Node {
        TermPtr term;
        CellPtr type;
        CellPtr binder;
        std::vector<Node> children;
    };

    Node infer(const TermPtr& t, std::map<std::string, CellPtr>& scope) {
        switch (t->kind) {
            case Term::Kind::Var: {
                auto it = scope.find(t->name);
                CellPtr ty;
                if (it != scope.end()) {
                    ty = it->second;
                } else {
                    auto fit = env.find(t->name);
                    if (fit == env.end()) fit = env.emplace(t->name, fresh()).first;
                    ty = fit->second;
                }
                return Node{t, ty, nullptr, {}};
            }
            case Term::Kind::Abs: {
                CellPtr dom = fresh();
                auto shadowed = scope.find(t->name);
                CellPtr saved = shadowed != scope.end() ? shadowed->second : nullptr;
                scope[t->name] = dom;
                Node body = infer(t->sub1, scope);
                if (saved) scope[t->name] = saved; else scope.erase(t->name);
                auto arrow = fresh();
                arrow->is_arrow = true;
                arrow->left = dom;
                arrow->right = body.type;
                Node n{t, arrow, dom, {}};
                n.children.push_back(std::move(body));
                return n;
            }
            case Term::Kind::App: {
                Node fun = infer(t->sub1, scope);
                Node arg = infer(t->sub2, scope);
                CellPtr res = fresh();
                auto arrow = fresh();
                arrow->is_arrow = true;
                arrow->left = arg.type;
                arrow->right = res;
                unify(fun.type, arrow, t);
                Node n{t, res, nullptr, {}};
                n.children.push_back(std::move(fun));
                n.children.push_back(std::move(arg));
                return n;
            }
        }
        throw std::logic_error("bad term kind");
    }
};

std::string var_name_for(int index) {
    std::string base(1, static_cast<char>('a' + index % 26));
    if (index >= 26) base += std::to_string(index / 26);
    return base;
}

STPtr freeze(CellPtr c, std::map<Cell*, STPtr>& names, int& counter) {
    c = find(c);
    if (c->is_arrow)
        return st_arrow(freeze(c->left, names, counter), freeze(c->right, names, counter));
    auto it = names.find(c.get());
    if (it != names.end()) return it->second;
    STPtr v = st_var(var_name_for(counter++));
    names.emplace(c.get(), v);
    return v;
}

TypedTree freeze_tree(const Inferencer::Node& n, std::map<Cell*, STPtr>& names, int& counter) {
    TypedTree t;
    t.node = n.term;
    t.type = freeze(n.type, names, counter);
    if (n.binder) t.binder_type = freeze(n.binder, names, counter);
    for (auto& c : n.children) t.children.push_back(freeze_tree(c, names, counter));
    return t;
}

}  // namespace

std::pair<STPtr, TypedTree> principal_type(const TermPtr& t) {
    Inferencer inf;
    std::map<std::string, CellPtr> scope;
    Inferencer::Node root = inf.infer(t, scope);
    std::map<Cell*, STPtr> names;
    int counter = 0;
    // Name schema variables in order of first appearance in the printed type.
    TypedTree tree = freeze_tree(root, names, counter);
    STPtr ty = freeze(root.type, names, counter);
    return {ty, tree};
}

namespace {

void match(const STPtr& schema, const STPtr& target, std::map<std::string, STPtr>& sub) {
    switch (schema->kind) {
        case SimpleType::Kind::Base:
            if (target->kind != SimpleType::Kind::Base)
                throw NotAnInstance("ground 'o' cannot match " + st_format(target));
            return;
        case SimpleType::Kind::Var: {
            auto it = sub.find(schema->name);
            if (it == sub.end()) { sub.emplace(schema->name, target); return; }
            if (!st_eq(it->second, target))
                throw NotAnInstance("schema variable " + schema->name + " matched both " +
                                    st_format(it->second) + " and " + st_format(target));
            return;
        }
        case SimpleType::Kind::Arrow:
            if (target->kind != SimpleType::Kind::Arrow)
                throw NotAnInstance(st_format(schema) + " cannot match " + st_format(target));
            match(schema->left, target->left, sub);
            match(schema->right, target->right, sub);
            return;
    }
}

STPtr apply_sub(const STPtr& t, const std::map<std::string, STPtr>& sub) {
    switch (t->kind) {
        case SimpleType::Kind::Base: return t;
        case SimpleType::Kind::Var: {
            auto it = sub.find(t->name);
            return it != sub.end() ? it->second : t;
        }
        case SimpleType::Kind::Arrow:
            return st_arrow(apply_sub(t->left, sub), apply_sub(t->right, sub));
    }
    return t;
}

TypedTree apply_sub_tree(const TypedTree& tree, const std::map<std::string, STPtr>& sub) {
    TypedTree out;
    out.node = tree.node;
    out.type = apply_sub(tree.type, sub);
    if (tree.binder_type) out.binder_type = apply_sub(tree.binder_type, sub);
    for (auto& c : tree.children) out.children.push_back(apply_sub_tree(c, sub));
    return out;
}

}  // namespace

bool is_instance_of(const STPtr& schema, const STPtr& target) {
    std::map<std::string, STPtr> sub;
    try {
        match(schema, target, sub);
        return true;
    } catch (const NotAnInstance&) {
        return false;
    }
}

TypedTree annotate(const TermPtr& t, const STPtr& target) {
    auto [schema, tree] = principal_type(t);
    std::map<std::string, STPtr> sub;
    match(schema, target, sub);
    return apply_sub_tree(tree, sub);
}

bool check_typed_tree(const TypedTree& tree) {
    switch (tree.node->kind) {
        case Term::Kind::Var:
            return tree.children.empty();
        case Term::Kind::Abs: {
            if (tree.children.size() != 1 || !tree.binder_type) return false;
            if (tree.type->kind != SimpleType::Kind::Arrow) return false;
            if (!st_eq(tree.type->left, tree.binder_type)) return false;
            if (!st_eq(tree.type->right, tree.children[0].type)) return false;
            // every occurrence of the binder in the body carries the binder type
            std::function<bool(const TypedTree&)> occ_ok = [&](const TypedTree& n) -> bool {
                if (n.node->kind == Term::Kind::Var && n.node->name == tree.node->name)
                    return st_eq(n.type, tree.binder_type);
                if (n.node->kind == Term::Kind::Abs && n.node->name == tree.node->name)
                    return true;  // shadowed below
                for (auto& c : n.children)
                    if (!occ_ok(c)) return false;
                return true;
            };
            return occ_ok(tree.children[0]) && check_typed_tree(tree.children[0]);
        }
        case Term::Kind::App: {
            if (tree.children.size() != 2) return false;
            const STPtr& f = tree.children[0].type;
            if (f->kind != SimpleType::Kind::Arrow) return false;
            if (!st_eq(f->left, tree.children[1].type)) return false;
            if (!st_eq(f->right, tree.type)) return false;
            return check_typed_tree(tree.children[0]) && check_typed_tree(tree.children[1]);
        }
    }
    return false;
}

}  // namespace eal
