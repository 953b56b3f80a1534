#include "gsr/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

namespace gsr {

ParseError::ParseError(const std::string& message, std::size_t offset)
    : std::runtime_error(message + " at offset " + std::to_string(offset))
    , offset_(offset)
{
}

namespace {

    class Parser {
    public:
        Parser(std::string_view text, int arity) : text_(text), arity_(arity) {}

        Expr parse_all()
        {
            Expr e = parse_expr();
            skip_space();
            if (pos_ != text_.size()) {
                fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
            }
            return e;
        }

    private:
        [[noreturn]] void fail(const std::string& message) const { throw ParseError("syntax error: " + message, pos_); }

        void skip_space()
        {
            while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
                ++pos_;
            }
        }

        bool accept(char c)
        {
            skip_space();
            if (pos_ < text_.size() && text_[pos_] == c) {
                ++pos_;
                return true;
            }
            return false;
        }

        void expect(char c)
        {
            if (!accept(c)) {
                fail(std::string("expected '") + c + "'");
            }
        }

        Expr parse_expr()
        {
            Expr lhs = parse_term();
            for (;;) {
                if (accept('+')) {
                    lhs = lhs + parse_term();
                } else if (accept('-')) {
                    lhs = lhs - parse_term();
                } else {
                    return lhs;
                }
            }
        }

        Expr parse_term()
        {
            Expr lhs = parse_factor();
            for (;;) {
                if (accept('*')) {
                    lhs = lhs * parse_factor();
                } else if (accept('/')) {
                    lhs = lhs / parse_factor();
                } else {
                    return lhs;
                }
            }
        }

        Expr parse_factor()
        {
            Expr base = parse_base();
            if (accept('^')) {
                return pow(base, parse_base());
            }
            return base;
        }

        Expr parse_base()
        {
            skip_space();
            if (pos_ >= text_.size()) {
                fail("unexpected end of input");
            }
            char c = text_[pos_];
            if (c == '-') {
                ++pos_;
                return -parse_base();
            }
            if (c == '(') {
                ++pos_;
                Expr inner = parse_expr();
                expect(')');
                return inner;
            }
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
                return parse_number();
            }
            if (std::isalpha(static_cast<unsigned char>(c))) {
                return parse_identifier();
            }
            fail("unexpected character '" + std::string(1, c) + "'");
        }

        Expr parse_number()
        {
            std::size_t start = pos_;
            auto digits = [&] {
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                    ++pos_;
                }
            };
            digits();
            if (pos_ < text_.size() && text_[pos_] == '.') {
                ++pos_;
                digits();
            }
            if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
                std::size_t mark = pos_++;
                if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) {
                    ++pos_;
                }
                if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                    digits();
                } else {
                    pos_ = mark; // 'e' belongs to something else
                }
            }
            double value = 0.0;
            auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
            if (ec != std::errc() || ptr != text_.data() + pos_) {
                pos_ = start;
                fail("malformed number");
            }
            return Expr::constant(value);
        }

        Expr parse_identifier()
        {
            std::size_t start = pos_;
            while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) {
                ++pos_;
            }
            std::string_view name = text_.substr(start, pos_ - start);
            if (name.size() > 1 && name[0] == 'x'
                && std::all_of(name.begin() + 1, name.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); })) {
                int index = 0;
                auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), index);
                if (ec != std::errc() || index < 1) {
                    pos_ = start;
                    fail("invalid variable '" + std::string(name) + "'");
                }
                if (index > arity_) {
                    pos_ = start;
                    throw ParseError("variable x" + std::to_string(index) + " exceeds arity " + std::to_string(arity_), start);
                }
                return Expr::variable(index);
            }
            Op op {};
            if (name == "sin") {
                op = Op::Sin;
            } else if (name == "cos") {
                op = Op::Cos;
            } else if (name == "exp") {
                op = Op::Exp;
            } else if (name == "ln") {
                op = Op::Ln;
            } else if (name == "sqrt") {
                op = Op::Sqrt;
            } else {
                pos_ = start;
                fail("unknown identifier '" + std::string(name) + "'");
            }
            expect('(');
            Expr arg = parse_expr();
            expect(')');
            return Expr::unary(op, arg);
        }

        std::string_view text_;
        int arity_;
        std::size_t pos_ {0};
    };

} // namespace

Expr parse(std::string_view text, int arity)
{
    if (arity < 1) {
        throw std::invalid_argument("arity must be >= 1");
    }
    return Parser(text, arity).parse_all();
}

} // namespace gsr
