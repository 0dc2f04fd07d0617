#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#include "sosreg/catalog.hpp"

namespace sosreg {

namespace {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End };

struct Token {
    Tok kind;
    std::string text;
    double number = 0.0;
    int line = 1;
    int column = 1;
};

std::vector<Token> tokenize(const std::string& src, int line0, int col0) {
    std::vector<Token> out;
    int line = line0, col = col0;
    std::size_t i = 0;
    auto single = [&](Tok k) {
        out.push_back(Token{k, std::string(1, src[i]), 0.0, line, col});
        ++i;
        ++col;
    };
    while (i < src.size()) {
        char c = src[i];
        if (c == '\n') {
            ++line;
            col = 1;
            ++i;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            ++col;
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t j = i;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            if (j < src.size() && src[j] == '.') {
                ++j;
                while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            }
            if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
                if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
                    while (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) ++k;
                    j = k;
                }
            }
            std::string text = src.substr(i, j - i);
            if (text == ".") throw ParseError("malformed number", line, col);
            out.push_back(Token{Tok::Number, text, std::strtod(text.c_str(), nullptr), line, col});
            col += static_cast<int>(j - i);
            i = j;
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
            out.push_back(Token{Tok::Ident, src.substr(i, j - i), 0.0, line, col});
            col += static_cast<int>(j - i);
            i = j;
            continue;
        }
        switch (c) {
            case '+': single(Tok::Plus); break;
            case '-': single(Tok::Minus); break;
            case '*': single(Tok::Star); break;
            case '/': single(Tok::Slash); break;
            case '^': single(Tok::Caret); break;
            case '(': single(Tok::LParen); break;
            case ')': single(Tok::RParen); break;
            case ',': single(Tok::Comma); break;
            default: throw ParseError(std::string("unexpected character '") + c + "'", line, col);
        }
    }
    out.push_back(Token{Tok::End, "", 0.0, line, col});
    return out;
}

class Parser {
public:
    Parser(std::vector<Token> toks, std::vector<std::string>& vars, bool allow_new, const FunctionTable* fns)
        : toks_(std::move(toks)), vars_(vars), allow_new_(allow_new), fns_(fns) {}

    Expr parse_all() {
        Expr e = expr();
        if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "'");
        return e;
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    const Token& next() { return toks_[pos_++]; }
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg, peek().line, peek().column);
    }
    void expect(Tok k, const char* what) {
        if (peek().kind != k) fail(std::string("expected ") + what);
        ++pos_;
    }

    Expr expr() {
        Expr lhs = term();
        while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
            bool plus = next().kind == Tok::Plus;
            Expr rhs = term();
            lhs = plus ? add(lhs, rhs) : sub(lhs, rhs);
        }
        return lhs;
    }

    Expr term() {
        if (peek().kind == Tok::Minus) {
            ++pos_;
            return neg(term());
        }
        Expr lhs = factor();
        while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
            bool times = next().kind == Tok::Star;
            Expr rhs = factor();
            lhs = times ? mul(lhs, rhs) : div(lhs, rhs);
        }
        return lhs;
    }

    Expr factor() {
        if (peek().kind == Tok::Minus) {
            ++pos_;
            return neg(factor());
        }
        Expr b = base();
        if (peek().kind == Tok::Caret) {
            ++pos_;
            b = pow(b, exponent());
        }
        return b;
    }

    double exponent() {
        double sign = 1.0;
        if (peek().kind == Tok::Minus) {
            ++pos_;
            sign = -1.0;
        }
        if (peek().kind == Tok::Number) return sign * next().number;
        if (peek().kind == Tok::LParen) {
            const Token& at = peek();
            ++pos_;
            Expr e = expr();
            expect(Tok::RParen, "')'");
            double v;
            if (!is_constant(e, &v)) throw ParseError("exponent must be a constant", at.line, at.column);
            return sign * v;
        }
        fail("expected a numeric exponent");
    }

    Expr base() {
        const Token& t = peek();
        switch (t.kind) {
            case Tok::Number: ++pos_; return constant(t.number);
            case Tok::LParen: {
                ++pos_;
                Expr e = expr();
                expect(Tok::RParen, "')'");
                return e;
            }
            case Tok::Ident: {
                ++pos_;
                if (peek().kind == Tok::LParen) return call(t);
                return identifier(t);
            }
            case Tok::End: fail("unexpected end of input");
            default: fail("unexpected '" + t.text + "'");
        }
    }

    Expr identifier(const Token& t) {
        if (t.text == "pi") return constant(std::numbers::pi);
        for (const auto& v : vars_)
            if (v == t.text) return variable(t.text);
        if (!allow_new_) throw ParseError("unknown identifier '" + t.text + "'", t.line, t.column);
        vars_.push_back(t.text);
        return variable(t.text);
    }

    Expr call(const Token& t) {
        expect(Tok::LParen, "'('");
        std::vector<Expr> args;
        if (peek().kind != Tok::RParen) {
            args.push_back(expr());
            while (peek().kind == Tok::Comma) {
                ++pos_;
                args.push_back(expr());
            }
        }
        expect(Tok::RParen, "')'");
        auto arity = [&](std::size_t n) {
            if (args.size() != n)
                throw ParseError("function '" + t.text + "' expects " + std::to_string(n) + " argument(s), got " +
                                     std::to_string(args.size()),
                                 t.line, t.column);
        };
        const std::string& f = t.text;
        if (f == "exp") return arity(1), exp(args[0]);
        if (f == "ln" || f == "log") return arity(1), log(args[0]);
        if (f == "sin") return arity(1), sin(args[0]);
        if (f == "cos") return arity(1), cos(args[0]);
        if (f == "sinpi") return arity(1), sinpi(args[0]);
        if (f == "cospi") return arity(1), cospi(args[0]);
        if (f == "sqrt") return arity(1), pow(args[0], 0.5);
        if (f == "ifpos") return arity(3), select(args[0], args[1], args[2]);
        if (fns_) {
            auto it = fns_->find(f);
            if (it != fns_->end()) {
                const FunctionDef& def = it->second;
                arity(def.variables.size());
                std::map<std::string, Expr> bind;
                for (std::size_t i = 0; i < args.size(); ++i) bind[def.variables[i]] = args[i];
                return substitute(def.body, bind);
            }
        }
        throw ParseError("unknown function '" + f + "'", t.line, t.column);
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::vector<std::string>& vars_;
    bool allow_new_;
    const FunctionTable* fns_;
};

Expr parse_at(const std::string& source, std::vector<std::string>& variables, bool allow_new,
              const FunctionTable* functions, int line, int col) {
    Parser p(tokenize(source, line, col), variables, allow_new, functions);
    return p.parse_all();
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

bool valid_identifier(const std::string& s) {
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    return true;
}

}  // namespace

Expr parse_expression(const std::string& source, std::vector<std::string>& variables, bool allow_new_variables,
                      const FunctionTable* functions) {
    return parse_at(source, variables, allow_new_variables, functions, 1, 1);
}

Expr parse_expression(const std::string& source) {
    std::vector<std::string> vars;
    return parse_expression(source, vars, true, nullptr);
}

FunctionTable parse_function_file(const std::string& text) {
    FunctionTable table;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string content = raw.substr(0, raw.find('#'));
        if (trim(content).empty()) continue;
        std::size_t lead = content.find_first_not_of(" \t");
        if (content.compare(lead, 4, "def ") != 0) throw ParseError("expected 'def'", line, static_cast<int>(lead) + 1);
        std::size_t open = content.find('(', lead + 4);
        std::size_t close = open == std::string::npos ? open : content.find(')', open);
        std::size_t eq = close == std::string::npos ? close : content.find('=', close);
        if (eq == std::string::npos)
            throw ParseError("expected 'def name(vars) = expr'", line, static_cast<int>(lead) + 1);
        FunctionDef def;
        def.name = trim(content.substr(lead + 4, open - lead - 4));
        if (!valid_identifier(def.name)) throw ParseError("invalid function name", line, static_cast<int>(lead) + 5);
        std::stringstream vars(content.substr(open + 1, close - open - 1));
        std::string v;
        while (std::getline(vars, v, ',')) {
            v = trim(v);
            if (!valid_identifier(v)) throw ParseError("invalid variable name '" + v + "'", line, static_cast<int>(open) + 2);
            def.variables.push_back(v);
        }
        if (def.variables.empty()) throw ParseError("function needs at least one variable", line, static_cast<int>(open) + 1);
        def.body = parse_at(content.substr(eq + 1), def.variables, false, &table, line, static_cast<int>(eq) + 2);
        def.domain = unit_ball(def.variables.size());
        table[def.name] = def;
    }
    return table;
}

FunctionTable load_function_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open function file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_function_file(buf.str());
}

}  // namespace sosreg
