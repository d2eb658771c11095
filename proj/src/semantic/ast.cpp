#include <trapdoor/semantic/ast.hpp>

#include <array>
#include <utility>

namespace trapdoor::semantic {

namespace {

constexpr std::array<std::pair<NodeKind, std::string_view>, 18> kKinds{{
    {NodeKind::Contract, "contract"},
    {NodeKind::StateVar, "state_var"},
    {NodeKind::Function, "function"},
    {NodeKind::Modifier, "modifier"},
    {NodeKind::Parameter, "parameter"},
    {NodeKind::Block, "block"},
    {NodeKind::If, "if"},
    {NodeKind::Call, "call"},
    {NodeKind::LowLevelCall, "low_level_call"},
    {NodeKind::Require, "require"},
    {NodeKind::Assert, "assert"},
    {NodeKind::Revert, "revert"},
    {NodeKind::Return, "return"},
    {NodeKind::Assignment, "assignment"},
    {NodeKind::BinaryOp, "binary_op"},
    {NodeKind::Identifier, "identifier"},
    {NodeKind::Literal, "literal"},
    {NodeKind::MemberAccess, "member_access"},
}};

constexpr std::array<std::pair<TypeTag, std::string_view>, 8> kTags{{
    {TypeTag::Address, "address"},
    {TypeTag::AddressList, "address_list"},
    {TypeTag::Bool, "bool"},
    {TypeTag::Int, "int"},
    {TypeTag::Uint, "uint"},
    {TypeTag::String, "string"},
    {TypeTag::Mapping, "mapping"},
    {TypeTag::Other, "other"},
}};

constexpr std::array<std::pair<Visibility, std::string_view>, 4> kVis{{
    {Visibility::Public, "public"},
    {Visibility::External, "external"},
    {Visibility::Internal, "internal"},
    {Visibility::Private, "private"},
}};

template <class E, std::size_t N>
std::string_view lookup_name(const std::array<std::pair<E, std::string_view>, N>& table, E v) {
    for (const auto& [e, s] : table) {
        if (e == v) return s;
    }
    return "?";
}

template <class E, std::size_t N>
std::optional<E> lookup_value(const std::array<std::pair<E, std::string_view>, N>& table,
                              std::string_view s) {
    for (const auto& [e, name] : table) {
        if (name == s) return e;
    }
    return std::nullopt;
}

std::string id_text(NodeId id) { return "node " + std::to_string(id); }

} // namespace

std::string_view to_string(NodeKind k) { return lookup_name(kKinds, k); }
std::string_view to_string(TypeTag t) { return lookup_name(kTags, t); }
std::string_view to_string(Visibility v) { return lookup_name(kVis, v); }
std::optional<NodeKind> parse_node_kind(std::string_view s) { return lookup_value(kKinds, s); }
std::optional<TypeTag> parse_type_tag(std::string_view s) { return lookup_value(kTags, s); }
std::optional<Visibility> parse_visibility(std::string_view s) { return lookup_value(kVis, s); }

const Node& ContractAst::at(NodeId id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw AstError("no " + id_text(id));
    return nodes[it->second];
}

std::optional<NodeId> ContractAst::parent(NodeId id) const {
    auto it = parent_.find(id);
    if (it == parent_.end()) return std::nullopt;
    return it->second;
}

std::size_t ContractAst::contract_of(NodeId id) const {
    auto it = contract_.find(id);
    if (it == contract_.end()) throw AstError("no " + id_text(id));
    return it->second;
}

void ContractAst::reindex() {
    index_.clear();
    parent_.clear();
    contract_.clear();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (!index_.emplace(nodes[i].id, i).second) {
            throw AstError("duplicate " + id_text(nodes[i].id));
        }
    }
    for (std::size_t c = 0; c < contracts.size(); ++c) {
        for (NodeId id : contracts[c].node_ids) contract_[id] = c;
    }
    for (const auto& n : nodes) {
        for (NodeId child : n.children) {
            if (!index_.count(child)) {
                throw AstError(id_text(n.id) + " has dangling child " + std::to_string(child));
            }
            if (child == n.id) throw AstError(id_text(n.id) + " lists itself as a child");
            if (!parent_.emplace(child, n.id).second) {
                throw AstError(id_text(child) + " has more than one parent");
            }
        }
    }
    // Single parents plus no cycles makes a forest; walk up from every node.
    for (const auto& n : nodes) {
        NodeId cur = n.id;
        std::size_t steps = 0;
        while (auto p = parent(cur)) {
            cur = *p;
            if (++steps > nodes.size()) throw AstError("cyclic children through " + id_text(n.id));
        }
    }
}

ContractAst parse_ast(const nlohmann::json& document) {
    if (!document.is_object()) throw AstError("AST document must be a JSON object");
    if (auto v = document.find("schema_version");
        v != document.end() && (!v->is_number_integer() || v->get<int>() != 1)) {
        throw AstError("unsupported schema_version");
    }
    auto contracts = document.find("contracts");
    if (contracts == document.end() || !contracts->is_array()) {
        throw AstError("AST document lacks a contracts array");
    }
    ContractAst ast;
    try {
        for (const auto& c : *contracts) {
            ContractEntry entry;
            entry.name = c.at("name").get<std::string>();
            for (const auto& jn : c.at("nodes")) {
                Node n;
                n.id = jn.at("id").get<NodeId>();
                const auto kind_text = jn.at("kind").get<std::string>();
                auto kind = parse_node_kind(kind_text);
                if (!kind) throw AstError(id_text(n.id) + " has unknown kind '" + kind_text + "'");
                n.kind = *kind;
                n.name = jn.value("name", std::string{});
                if (auto t = jn.find("type_tag"); t != jn.end() && !t->is_null()) {
                    auto tag = parse_type_tag(t->get<std::string>());
                    if (!tag) throw AstError(id_text(n.id) + " has unknown type_tag");
                    n.type_tag = *tag;
                }
                n.constant = jn.value("constant", false);
                if (auto v = jn.find("visibility"); v != jn.end() && !v->is_null()) {
                    auto vis = parse_visibility(v->get<std::string>());
                    if (!vis) throw AstError(id_text(n.id) + " has unknown visibility");
                    n.visibility = *vis;
                }
                if (auto ch = jn.find("children"); ch != jn.end() && !ch->is_null()) {
                    n.children = ch->get<std::vector<NodeId>>();
                }
                if (auto r = jn.find("refs"); r != jn.end() && !r->is_null()) {
                    n.refs = r->get<NodeId>();
                }
                entry.node_ids.push_back(n.id);
                ast.nodes.push_back(std::move(n));
            }
            ast.contracts.push_back(std::move(entry));
        }
    } catch (const nlohmann::json::exception& ex) {
        throw AstError(std::string("malformed AST document: ") + ex.what());
    }
    ast.reindex();
    for (auto& n : ast.nodes) {
        if (n.kind != NodeKind::Identifier && n.kind != NodeKind::Call) continue;
        if (!n.refs || !ast.contains(*n.refs)) {
            n.refs.reset();
            n.external = true;
        }
    }
    return ast;
}

ContractAst parse_ast_text(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& ex) {
        throw AstError(std::string("AST is not valid JSON: ") + ex.what());
    }
    return parse_ast(doc);
}

nlohmann::json to_document(const ContractAst& ast) {
    nlohmann::json contracts = nlohmann::json::array();
    for (const auto& c : ast.contracts) {
        nlohmann::json nodes = nlohmann::json::array();
        for (NodeId id : c.node_ids) {
            const auto& n = ast.at(id);
            nodes.push_back({{"id", n.id},
                             {"kind", to_string(n.kind)},
                             {"name", n.name},
                             {"type_tag", to_string(n.type_tag)},
                             {"constant", n.constant},
                             {"visibility", to_string(n.visibility)},
                             {"children", n.children},
                             {"refs", n.refs ? nlohmann::json(*n.refs) : nlohmann::json()}});
        }
        contracts.push_back({{"name", c.name}, {"nodes", std::move(nodes)}});
    }
    return {{"schema_version", 1}, {"contracts", std::move(contracts)}};
}

} // namespace trapdoor::semantic
