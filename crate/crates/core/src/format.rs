//! Plain-text file formats.
//!
//! All formats are UTF-8, whitespace separated, with decimal integers of
//! unbounded length. Blank lines and lines starting with `#` are ignored.
//!
//! ```text
//! ilp d n                 knapsack n          bp d
//! <d rows of A>           <n weights>         <d sizes>
//! <b>                     <C>                 <d multiplicities>
//! <u>                     [names ...]         <C>
//! [cost c_1 .. c_n]                           [B]
//! [names v_1 .. v_n]
//! ```
//!
//! The `names` line is optional and only written when the variable names
//! differ from the default `x1..xn`. A vector of length zero occupies no line.

use std::fmt::Write as _;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::model::{BinPackingInstance, EqualityIlp, KnapsackEquality, SolutionVector};

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            inner: text.lines().enumerate(),
        }
    }

    fn next_line(&mut self) -> Option<(usize, Vec<&'a str>)> {
        for (idx, line) in self.inner.by_ref() {
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            return Some((idx + 1, trimmed.split_whitespace().collect()));
        }
        None
    }

    fn expect_line(&mut self, what: &str) -> Result<(usize, Vec<&'a str>)> {
        self.next_line().ok_or_else(|| Error::Parse {
            line: 0,
            message: format!("unexpected end of input, expected {what}"),
        })
    }

    fn expect_ints(&mut self, count: usize, what: &str) -> Result<Vec<BigInt>> {
        if count == 0 {
            return Ok(Vec::new());
        }
        let (line, tokens) = self.expect_line(what)?;
        parse_ints(line, &tokens, count, what)
    }

    fn expect_int(&mut self, what: &str) -> Result<BigInt> {
        Ok(self.expect_ints(1, what)?.remove(0))
    }
}

fn parse_int(line: usize, token: &str) -> Result<BigInt> {
    let digits = token.strip_prefix('-').unwrap_or(token);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::Parse {
            line,
            message: format!("not a decimal integer: {token:?}"),
        });
    }
    token.parse().map_err(|_| Error::Parse {
        line,
        message: format!("not a decimal integer: {token:?}"),
    })
}

fn parse_ints(line: usize, tokens: &[&str], count: usize, what: &str) -> Result<Vec<BigInt>> {
    if tokens.len() != count {
        return Err(Error::Parse {
            line,
            message: format!(
                "expected {count} entries for {what}, found {}",
                tokens.len()
            ),
        });
    }
    tokens.iter().map(|t| parse_int(line, t)).collect()
}

fn parse_count(line: usize, token: &str) -> Result<usize> {
    token.parse().map_err(|_| Error::Parse {
        line,
        message: format!("not a count: {token:?}"),
    })
}

fn header(lines: &mut Lines<'_>, keyword: &str, arity: usize) -> Result<Vec<usize>> {
    let (line, tokens) = lines.expect_line("header")?;
    if tokens.first() != Some(&keyword) || tokens.len() != arity + 1 {
        return Err(Error::Parse {
            line,
            message: format!("expected header `{keyword}` with {arity} count(s)"),
        });
    }
    tokens[1..].iter().map(|t| parse_count(line, t)).collect()
}

fn no_trailing(lines: &mut Lines<'_>) -> Result<()> {
    match lines.next_line() {
        None => Ok(()),
        Some((line, _)) => Err(Error::Parse {
            line,
            message: "unexpected trailing content".into(),
        }),
    }
}

fn push_ints(out: &mut String, prefix: Option<&str>, values: &[BigInt]) {
    if values.is_empty() && prefix.is_none() {
        return;
    }
    let mut first = true;
    if let Some(p) = prefix {
        out.push_str(p);
        first = false;
    }
    for v in values {
        if !first {
            out.push(' ');
        }
        first = false;
        let _ = write!(out, "{v}");
    }
    out.push('\n');
}

fn has_default_names(names: &[String]) -> bool {
    names
        .iter()
        .enumerate()
        .all(|(j, name)| *name == format!("x{}", j + 1))
}

fn push_names(out: &mut String, names: &[String]) {
    if !has_default_names(names) {
        out.push_str("names");
        for name in names {
            out.push(' ');
            out.push_str(name);
        }
        out.push('\n');
    }
}

pub fn write_ilp(ilp: &EqualityIlp) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "ilp {} {}", ilp.num_constraints(), ilp.num_vars());
    for row in ilp.matrix() {
        push_ints(&mut out, None, row);
    }
    push_ints(&mut out, None, ilp.rhs());
    push_ints(&mut out, None, ilp.upper());
    if let Some(cost) = ilp.cost() {
        push_ints(&mut out, Some("cost"), cost);
    }
    push_names(&mut out, ilp.var_names());
    out
}

pub fn parse_ilp(text: &str) -> Result<EqualityIlp> {
    let mut lines = Lines::new(text);
    let dims = header(&mut lines, "ilp", 2)?;
    let (d, n) = (dims[0], dims[1]);
    let matrix = (0..d)
        .map(|i| lines.expect_ints(n, &format!("row {} of A", i + 1)))
        .collect::<Result<Vec<_>>>()?;
    let rhs = lines.expect_ints(d, "b")?;
    let upper = lines.expect_ints(n, "u")?;
    let mut ilp = EqualityIlp::new(matrix, rhs, upper)?;
    let mut pending = lines.next_line();
    if let Some((line, tokens)) = pending.as_ref() {
        if tokens[0] == "cost" {
            ilp = ilp.with_cost(parse_ints(*line, &tokens[1..], n, "cost")?)?;
            pending = lines.next_line();
        }
    }
    if let Some((line, tokens)) = pending {
        if tokens[0] != "names" || tokens.len() != n + 1 {
            return Err(Error::Parse {
                line,
                message: "expected optional `cost` or `names` line".into(),
            });
        }
        ilp = ilp.with_var_names(tokens[1..].iter().map(|s| s.to_string()).collect())?;
    }
    no_trailing(&mut lines)?;
    Ok(ilp)
}

pub fn write_knapsack(kp: &KnapsackEquality) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "knapsack {}", kp.num_vars());
    push_ints(&mut out, None, kp.weights());
    push_ints(&mut out, None, std::slice::from_ref(kp.rhs()));
    push_names(&mut out, kp.var_names());
    out
}

pub fn parse_knapsack(text: &str) -> Result<KnapsackEquality> {
    let mut lines = Lines::new(text);
    let n = header(&mut lines, "knapsack", 1)?[0];
    let weights = lines.expect_ints(n, "weights")?;
    let rhs = lines.expect_int("C")?;
    let mut kp = KnapsackEquality::new(weights, rhs);
    if let Some((line, tokens)) = lines.next_line() {
        if tokens[0] != "names" || tokens.len() != n + 1 {
            return Err(Error::Parse {
                line,
                message: "expected optional `names` line".into(),
            });
        }
        kp = kp.with_var_names(tokens[1..].iter().map(|s| s.to_string()).collect())?;
    }
    no_trailing(&mut lines)?;
    Ok(kp)
}

pub fn write_bin_packing(bp: &BinPackingInstance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "bp {}", bp.num_item_types());
    push_ints(&mut out, None, bp.sizes());
    push_ints(&mut out, None, bp.multiplicities());
    push_ints(&mut out, None, std::slice::from_ref(bp.capacity()));
    if let Some(b) = bp.bin_budget() {
        let _ = writeln!(out, "{b}");
    }
    out
}

pub fn parse_bin_packing(text: &str) -> Result<BinPackingInstance> {
    let mut lines = Lines::new(text);
    let d = header(&mut lines, "bp", 1)?[0];
    let sizes = lines.expect_ints(d, "sizes")?;
    let multiplicities = lines.expect_ints(d, "multiplicities")?;
    let capacity = lines.expect_int("C")?;
    let budget = match lines.next_line() {
        None => None,
        Some((line, tokens)) if tokens.len() == 1 => {
            Some(parse_count(line, tokens[0]).map_err(|_| Error::Parse {
                line,
                message: format!("bin budget must be a non-negative count: {:?}", tokens[0]),
            })? as u64)
        }
        Some((line, _)) => {
            return Err(Error::Parse {
                line,
                message: "expected a single bin budget".into(),
            })
        }
    };
    no_trailing(&mut lines)?;
    BinPackingInstance::new(sizes, multiplicities, capacity, budget)
}

/// One configuration per line.
pub fn write_configurations(configs: &[SolutionVector]) -> String {
    let mut out = String::new();
    for c in configs {
        let _ = writeln!(out, "{c}");
    }
    out
}

pub fn parse_configurations(text: &str) -> Result<Vec<SolutionVector>> {
    let mut lines = Lines::new(text);
    let mut configs = Vec::new();
    while let Some((line, tokens)) = lines.next_line() {
        let values = tokens
            .iter()
            .map(|t| parse_int(line, t))
            .collect::<Result<Vec<_>>>()?;
        configs.push(SolutionVector::new(values).map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?);
    }
    Ok(configs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ints(values: &[i64]) -> Vec<BigInt> {
        values.iter().map(|&v| BigInt::from(v)).collect()
    }

    #[test]
    fn parses_documented_ilp_layout() {
        let text = "# tiny\nilp 1 2\n1 -1\n\n0\n3 3\ncost 1 2\n";
        let ilp = parse_ilp(text).unwrap();
        assert_eq!(ilp.matrix(), &[ints(&[1, -1])]);
        assert_eq!(ilp.rhs(), ints(&[0]).as_slice());
        assert_eq!(ilp.upper(), ints(&[3, 3]).as_slice());
        assert_eq!(ilp.cost(), Some(ints(&[1, 2]).as_slice()));
        assert_eq!(write_ilp(&ilp), "ilp 1 2\n1 -1\n0\n3 3\ncost 1 2\n");
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(parse_ilp("ilp 1 2\n1\n0\n3 3\n").is_err());
        assert!(parse_ilp("ilp 1 1\n1\n0\n3\nbogus\n").is_err());
        assert!(parse_ilp("ilp 1 1\n1\n0\n-3\n").is_err());
        assert!(parse_ilp("ilp 1 1\n1.5\n0\n3\n").is_err());
        assert!(parse_ilp("ilp 1 1\n+1\n0\n3\n").is_err());
        assert!(parse_knapsack("knapsack 2\n1 2\n").is_err());
        assert!(parse_bin_packing("bp 1\n6\n1\n5\n").is_err());
        assert!(parse_bin_packing("bp 1\n2\n1\n5\n1\n1\n").is_err());
        let err = parse_ilp("ilp 1 2\n1 2\n0\n3 x\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 4, .. }));
    }

    #[test]
    fn knapsack_and_bin_packing_layouts() {
        let kp = parse_knapsack("knapsack 3\n91 90 81\n272\n").unwrap();
        assert_eq!(kp.weights(), ints(&[91, 90, 81]).as_slice());
        assert_eq!(kp.rhs(), &BigInt::from(272));
        let bp = parse_bin_packing("bp 2\n2 3\n4 1\n5\n3\n").unwrap();
        assert_eq!(bp.bin_budget(), Some(3));
        assert_eq!(write_bin_packing(&bp), "bp 2\n2 3\n4 1\n5\n3\n");
    }

    fn big_int() -> impl Strategy<Value = BigInt> {
        (any::<bool>(), "[0-9]{1,1200}").prop_map(|(neg, digits)| {
            let v: BigInt = digits.parse().unwrap();
            if neg {
                -v
            } else {
                v
            }
        })
    }

    fn non_negative_big_int() -> impl Strategy<Value = BigInt> {
        "[0-9]{1,1200}".prop_map(|digits| digits.parse().unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn ilp_round_trip(
            (d, n) in (0usize..4, 1usize..4),
            seed in prop::collection::vec(big_int(), 16),
            upper in prop::collection::vec(non_negative_big_int(), 3),
            with_cost in any::<bool>(),
            named in any::<bool>(),
        ) {
            let matrix: Vec<Vec<BigInt>> =
                (0..d).map(|i| (0..n).map(|j| seed[i * 3 + j].clone()).collect()).collect();
            let rhs: Vec<BigInt> = (0..d).map(|i| seed[12 + i].clone()).collect();
            let upper: Vec<BigInt> = upper[..n].to_vec();
            let mut ilp = EqualityIlp::new(matrix, rhs, upper).unwrap();
            if with_cost {
                ilp = ilp.with_cost(seed[..n].to_vec()).unwrap();
            }
            if named {
                ilp = ilp.with_var_names((0..n).map(|j| format!("v_{j}")).collect()).unwrap();
            }
            prop_assert_eq!(parse_ilp(&write_ilp(&ilp)).unwrap(), ilp);
        }

        #[test]
        fn knapsack_round_trip(weights in prop::collection::vec(big_int(), 0..6), rhs in big_int()) {
            let kp = KnapsackEquality::new(weights, rhs);
            prop_assert_eq!(parse_knapsack(&write_knapsack(&kp)).unwrap(), kp);
        }

        #[test]
        fn bin_packing_round_trip(
            sizes in prop::collection::vec(1u64..1000, 1..6),
            extra in non_negative_big_int(),
            budget in prop::option::of(0u64..100),
        ) {
            let sizes: Vec<BigInt> = sizes.into_iter().map(BigInt::from).collect();
            let capacity = sizes.iter().max().unwrap() + &extra;
            let multiplicities: Vec<BigInt> = sizes.iter().map(|s| s * &extra).collect();
            let bp = BinPackingInstance::new(sizes, multiplicities, capacity, budget).unwrap();
            prop_assert_eq!(parse_bin_packing(&write_bin_packing(&bp)).unwrap(), bp);
        }
    }
}
