use super::formula::Formula;
use super::surface::SurfaceFormula as S;

const IFF: u8 = 0;
const IMP: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const UNARY: u8 = 4;

/// Canonical rendering with the fewest parentheses the parser needs.
pub fn print(f: &S) -> String {
    let mut out = String::new();
    go(f, IFF, true, &mut out);
    out
}

pub fn print_core(f: &Formula) -> String {
    print(&S::from_core(f))
}

fn level(f: &S) -> u8 {
    match f {
        S::Iff(..) => IFF,
        S::Implies(..) => IMP,
        S::Or(..) => OR,
        S::And(..) => AND,
        _ => UNARY,
    }
}

/// `rightmost` is true when nothing follows `f` before the enclosing
/// bracket closes, which is the only place a binder may appear bare.
fn go(f: &S, prec: u8, rightmost: bool, out: &mut String) {
    let binder = matches!(f, S::Nu(..) | S::Mu(..));
    if level(f) < prec || (binder && !rightmost) {
        out.push('(');
        go(f, IFF, true, out);
        out.push(')');
        return;
    }
    match f {
        S::Top => out.push('T'),
        S::Bot => out.push('F'),
        S::Var(x) => out.push_str(x.as_str()),
        S::Neg(a) => unary("~", a, rightmost, out),
        S::Dia(a) => unary("<>", a, rightmost, out),
        S::BoxOp(a) => unary("[]", a, rightmost, out),
        S::StarDia(a) => unary("<*>", a, rightmost, out),
        S::StarBox(a) => unary("[*]", a, rightmost, out),
        S::And(a, b) => binary(a, " & ", b, AND, UNARY, rightmost, out),
        S::Or(a, b) => binary(a, " | ", b, OR, AND, rightmost, out),
        S::Implies(a, b) => binary(a, " -> ", b, OR, IMP, rightmost, out),
        S::Iff(a, b) => binary(a, " <-> ", b, IFF, IMP, rightmost, out),
        S::Nu(x, a) | S::Mu(x, a) => {
            out.push_str(if matches!(f, S::Nu(..)) { "nu " } else { "mu " });
            out.push_str(x.as_str());
            out.push_str(". ");
            go(a, IFF, true, out);
        }
        S::TangleD(items) | S::TangleC(items) => {
            out.push_str(if matches!(f, S::TangleD(..)) {
                "tangle_d{"
            } else {
                "tangle_c{"
            });
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                go(item, IFF, true, out);
            }
            out.push('}');
        }
    }
}

fn unary(op: &str, a: &S, rightmost: bool, out: &mut String) {
    out.push_str(op);
    go(a, UNARY, rightmost, out);
}

fn binary(a: &S, op: &str, b: &S, left: u8, right: u8, rightmost: bool, out: &mut String) {
    go(a, left, false, out);
    out.push_str(op);
    go(b, right, rightmost, out);
}
