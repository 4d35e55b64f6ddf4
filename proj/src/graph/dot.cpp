#include "cml/graph/dot.hpp"

#include <cctype>
#include <fstream>
#include <optional>
#include <sstream>
#include <vector>

#include "cml/util/error.hpp"

namespace cml::graph {

namespace {

enum class Tok { Ident, Arrow, Dash, LBrace, RBrace, Semi, End };

struct Token {
    Tok kind;
    std::string text;
    int line;
};

[[noreturn]] void syntax_error(int line, const std::string& what) {
    throw GraphError("graph syntax error at line " + std::to_string(line) + ": " + what);
}

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> out;
    int line = 1;
    std::size_t i = 0;
    while (i < text.size()) {
        const char c = text[i];
        if (c == '\n') {
            ++line;
            ++i;
        } else if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else if (c == '#' || (c == '/' && i + 1 < text.size() && text[i + 1] == '/')) {
            while (i < text.size() && text[i] != '\n') ++i;
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = i;
            while (i < text.size() && (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_')) ++i;
            out.push_back({Tok::Ident, std::string(text.substr(start, i - start)), line});
        } else if (c == '-' && i + 1 < text.size() && text[i + 1] == '>') {
            out.push_back({Tok::Arrow, "->", line});
            i += 2;
        } else if (c == '-' && i + 1 < text.size() && text[i + 1] == '-') {
            out.push_back({Tok::Dash, "--", line});
            i += 2;
        } else if (c == '{') {
            out.push_back({Tok::LBrace, "{", line});
            ++i;
        } else if (c == '}') {
            out.push_back({Tok::RBrace, "}", line});
            ++i;
        } else if (c == ';') {
            out.push_back({Tok::Semi, ";", line});
            ++i;
        } else {
            syntax_error(line, std::string("unexpected character '") + c + "'");
        }
    }
    out.push_back({Tok::End, "", line});
    return out;
}

struct EdgeStmt {
    std::string from, to;
    bool directed;
    int line;
};

}  // namespace

AnyGraph parse_graph(std::string_view text) {
    const auto toks = tokenize(text);
    std::size_t pos = 0;
    auto peek = [&]() -> const Token& { return toks[pos]; };
    auto take = [&]() -> const Token& { return toks[pos++]; };

    const Token& head = take();
    if (head.kind != Tok::Ident || (head.text != "digraph" && head.text != "graph"))
        syntax_error(head.line, "expected 'digraph' or 'graph'");
    const bool is_digraph = head.text == "digraph";
    if (peek().kind == Tok::Ident) take();
    if (take().kind != Tok::LBrace) syntax_error(toks[pos - 1].line, "expected '{'");

    std::vector<std::string> declared;
    std::vector<std::string> implied;
    std::vector<EdgeStmt> edges;
    auto note = [](std::vector<std::string>& v, const std::string& n) {
        if (std::find(v.begin(), v.end(), n) == v.end()) v.push_back(n);
    };

    while (true) {
        const Token& t = take();
        if (t.kind == Tok::RBrace) break;
        if (t.kind == Tok::Semi) continue;
        if (t.kind == Tok::End) syntax_error(t.line, "missing '}'");
        if (t.kind != Tok::Ident) syntax_error(t.line, "expected identifier, found '" + t.text + "'");
        const bool has_op = (peek().kind == Tok::Arrow || peek().kind == Tok::Dash) && peek().line == t.line;
        if (!has_op) {
            note(declared, t.text);
        } else {
            const Token& op = take();
            const Token& rhs = take();
            if (rhs.kind != Tok::Ident || rhs.line != t.line) syntax_error(op.line, "edge is missing its target");
            if (is_digraph && op.kind == Tok::Dash) syntax_error(op.line, "undirected edge '--' inside a digraph");
            if (rhs.text == t.text) syntax_error(op.line, "self-loop on '" + t.text + "'");
            note(implied, t.text);
            note(implied, rhs.text);
            edges.push_back({t.text, rhs.text, op.kind == Tok::Arrow, t.line});
        }
        const Token& end = peek();
        if (end.kind == Tok::Semi) {
            take();
        } else if (end.kind != Tok::RBrace && end.line == t.line) {
            syntax_error(end.line, "expected ';' or end of line after statement");
        }
    }
    if (peek().kind != Tok::End) syntax_error(peek().line, "unexpected content after '}'");

    std::vector<std::string> nodes = declared;
    if (declared.empty()) {
        nodes = implied;
    } else {
        for (const auto& e : edges) {
            for (const auto* n : {&e.from, &e.to})
                if (std::find(declared.begin(), declared.end(), *n) == declared.end())
                    syntax_error(e.line, "unknown node '" + *n + "' in edge");
        }
    }

    if (is_digraph) {
        Dag g(nodes);
        for (const auto& e : edges) {
            try {
                g.add_edge(g.index_of(e.from), g.index_of(e.to));
            } catch (const GraphError& err) {
                syntax_error(e.line, err.what());
            }
        }
        return g;
    }
    Cpdag g(nodes);
    for (const auto& e : edges) {
        try {
            if (e.directed)
                g.add_directed(g.index_of(e.from), g.index_of(e.to));
            else
                g.add_undirected(g.index_of(e.from), g.index_of(e.to));
        } catch (const GraphError& err) {
            syntax_error(e.line, err.what());
        }
    }
    return g;
}

AnyGraph load_graph(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw GraphError("cannot open graph file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_graph(buf.str());
}

std::string serialize_graph(const Dag& g, std::string_view name) {
    std::ostringstream out;
    out << "digraph " << name << " {\n";
    for (const auto& n : g.nodes()) out << "  " << n << ";\n";
    for (const auto& [a, b] : g.edges()) out << "  " << g.name(a) << " -> " << g.name(b) << ";\n";
    out << "}\n";
    return out.str();
}

std::string serialize_graph(const Cpdag& g, std::string_view name) {
    std::ostringstream out;
    out << "graph " << name << " {\n";
    for (const auto& n : g.nodes()) out << "  " << n << ";\n";
    for (const auto& [a, b] : g.directed_edges()) out << "  " << g.name(a) << " -> " << g.name(b) << ";\n";
    for (const auto& [a, b] : g.undirected_edges()) out << "  " << g.name(a) << " -- " << g.name(b) << ";\n";
    out << "}\n";
    return out.str();
}

std::string serialize_graph(const AnyGraph& g, std::string_view name) {
    return std::visit([&](const auto& x) { return serialize_graph(x, name); }, g);
}

Cpdag as_cpdag(const AnyGraph& g) {
    if (const auto* dag = std::get_if<Dag>(&g)) return Cpdag::from_dag(*dag);
    return std::get<Cpdag>(g);
}

}  // namespace cml::graph
