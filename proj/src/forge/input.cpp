#include "input.hpp"

#include <cctype>

namespace forge {

namespace {

struct Parser {
    const std::string& s;
    size_t pos = 0;
    const VarCtx& vars;
    const TowerPtr& tw;

    void skip() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eat(char c) {
        skip();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    char peek() {
        skip();
        return pos < s.size() ? s[pos] : '\0';
    }

    RationalFunction parse() {
        RationalFunction r = expr();
        skip();
        if (pos != s.size())
            throw input_error("trailing characters in expression: '" + s.substr(pos) + "'");
        return r;
    }

    RationalFunction expr() {
        RationalFunction acc = term();
        while (true) {
            if (eat('+')) acc = acc + term();
            else if (eat('-')) acc = acc - term();
            else return acc;
        }
    }

    RationalFunction term() {
        RationalFunction acc = factor();
        while (true) {
            if (eat('*')) acc = acc * factor();
            else if (eat('/')) acc = acc / factor();
            else return acc;
        }
    }

    RationalFunction factor() {
        if (eat('-')) return -factor();
        if (eat('+')) return factor();
        RationalFunction base = atom();
        if (eat('^')) {
            bool neg = eat('-');
            skip();
            size_t start = pos;
            while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
            if (start == pos) throw input_error("expected integer exponent");
            long e = std::stol(s.substr(start, pos - start));
            return base.pow(neg ? -e : e);
        }
        return base;
    }

    RationalFunction atom() {
        skip();
        if (pos >= s.size()) throw input_error("unexpected end of expression");
        char c = s[pos];
        if (c == '(') {
            ++pos;
            RationalFunction r = expr();
            if (!eat(')')) throw input_error("missing closing parenthesis");
            return r;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t start = pos;
            while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
            Int n(s.substr(start, pos - start), 10);
            return RationalFunction(MultiPoly(vars, Elem(tw, Rational(n))));
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            size_t start = pos;
            while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) ||
                                      s[pos] == '_'))
                ++pos;
            std::string name = s.substr(start, pos - start);
            int vi = var_index(vars, name);
            if (vi >= 0) return RationalFunction(MultiPoly::var(vars, tw, vi));
            int pi = tw->param_index(name);
            if (pi >= 0) return RationalFunction(MultiPoly(vars, Elem::param(tw, pi)));
            for (int g = 0; g < tw->ngens(); ++g)
                if (tw->levels()[g].name == name)
                    return RationalFunction(MultiPoly(vars, Elem::gen(tw, g)));
            throw input_error("unknown identifier '" + name + "'");
        }
        throw input_error(std::string("unexpected character '") + c + "' in expression");
    }
};

}  // namespace

RationalFunction parse_expression(const std::string& text, const VarCtx& vars, const TowerPtr& t) {
    Parser p{text, 0, vars, t};
    return p.parse();
}

MultiPoly parse_poly(const std::string& text, const VarCtx& vars, const TowerPtr& t) {
    RationalFunction r = parse_expression(text, vars, t);
    if (!r.is_polynomial()) throw input_error("expression is not a polynomial: " + text);
    return r.poly_value();
}

}  // namespace forge
