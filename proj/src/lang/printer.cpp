#include <sstream>

#include "common/overloaded.hpp"
#include "qhl/parser.hpp"

namespace qhl {

namespace {

std::string join(const std::vector<std::string>& names) {
    std::string s;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i != 0) {
            s += ", ";
        }
        s += names[i];
    }
    return s;
}

class Printer {
public:
    std::string run(const Command& c) {
        stmt(c, 0);
        return out_.str();
    }

private:
    void indent(int level) {
        for (int i = 0; i < level; ++i) {
            out_ << "  ";
        }
    }

    // Statement list at the given level; the caller has already indented the
    // first line.
    void stmt(const Command& c, int level) {
        if (holds<Seq>(c)) {
            const auto parts = flatten_seq(std::make_shared<const Command>(c));
            for (std::size_t i = 0; i < parts.size(); ++i) {
                if (i != 0) {
                    out_ << ";\n";
                    indent(level);
                }
                simple(*parts[i], level);
            }
            return;
        }
        simple(c, level);
    }

    void block(const Command& c, int level) {
        out_ << "\n";
        indent(level);
        stmt(c, level);
        out_ << "\n";
    }

    void simple(const Command& c, int level) {
        std::visit(detail::overloaded{
                       [&](const Skip&) { out_ << "skip"; },
                       [&](const Seq&) { stmt(c, level); },
                       [&](const InitZero& x) { out_ << x.var << " := 0"; },
                       [&](const ApplyU& x) { out_ << join(x.vars) << " *= " << x.gate; },
                       [&](const MeasureCase& x) {
                           out_ << "measure " << x.meas << "(" << join(x.vars) << ") {\n";
                           for (std::size_t m = 0; m < x.branches.size(); ++m) {
                               indent(level + 1);
                               out_ << "case " << m << ":";
                               block(*x.branches[m], level + 2);
                           }
                           indent(level);
                           out_ << "}";
                       },
                       [&](const While& x) {
                           out_ << "while " << x.meas << "(" << join(x.vars) << ") = 1 do";
                           block(*x.body, level + 1);
                           indent(level);
                           out_ << "od";
                       },
                       [&](const NewBit& x) { out_ << "new bit " << x.var; },
                       [&](const NewQbit& x) { out_ << "new qbit " << x.var; },
                       [&](const Discard& x) { out_ << "discard " << x.var; },
                       [&](const AssignBit& x) { out_ << x.var << " := " << x.value; },
                       [&](const IfBit& x) { branches("if", x.var, *x.on_zero, *x.on_one, level); },
                       [&](const MeasureIf& x) {
                           branches("measure", x.var, *x.on_zero, *x.on_one, level);
                       },
                   },
                   c.node);
    }

    void branches(const char* kw, const std::string& var, const Command& on_zero,
                  const Command& on_one, int level) {
        out_ << kw << " " << var << " then";
        block(on_zero, level + 1);
        indent(level);
        out_ << "else";
        block(on_one, level + 1);
        indent(level);
        out_ << "fi";
    }

    std::ostringstream out_;
};

}  // namespace

std::string print(const Command& c) { return Printer{}.run(c); }

std::string print(const VarContext& ctx, const Command& c) {
    std::string out;
    if (!ctx.empty()) {
        out = "var ";
        for (std::size_t i = 0; i < ctx.size(); ++i) {
            const VarDecl& v = ctx.vars()[i];
            if (i != 0) {
                out += ", ";
            }
            out += v.name + ": " + kind_name(v.kind);
            if (v.kind == VarKind::Qunit) {
                out += "[" + std::to_string(v.dim) + "]";
            }
        }
        out += ";\n";
    }
    return out + print(c) + "\n";
}

}  // namespace qhl
