use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::scalar::Scalar;

/// Where a code sits on the andness axis: a single point or a closed interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AndnessAnchor {
    Point(f64),
    Interval(f64, f64),
}

impl AndnessAnchor {
    /// Representative value: the point, or the interval midpoint.
    pub fn representative(self) -> f64 {
        match self {
            AndnessAnchor::Point(p) => p,
            AndnessAnchor::Interval(lo, hi) => 0.5 * (lo + hi),
        }
    }
}

/// The 23 two-argument aggregator codes, ordered from most conjunctive to
/// most disjunctive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AndnessCode {
    CC,
    HHC,
    CP,
    LHC,
    C,
    HCPlus,
    HC,
    HCMinus,
    SCPlus,
    SC,
    SCMinus,
    A,
    SDMinus,
    SD,
    SDPlus,
    HDMinus,
    HD,
    HDPlus,
    D,
    LHD,
    DP,
    HHD,
    DD,
}

struct Row {
    code: AndnessCode,
    symbol: &'static str,
    name: &'static str,
    anchor: AndnessAnchor,
    family: &'static str,
    subtype: &'static str,
    verbalization: &'static str,
}

const fn pt(v: f64) -> AndnessAnchor {
    AndnessAnchor::Point(v)
}

const fn iv(lo: f64, hi: f64) -> AndnessAnchor {
    AndnessAnchor::Interval(lo, hi)
}

const MUST_ALL: &str = "Must have all";
const MOST: &str = "Nice to have most";
const NICE: &str = "Nice to have";
const SOME: &str = "Nice to have some";
const ANY: &str = "Enough to have any";

use AndnessCode::*;

#[rustfmt::skip]
const TABLE: [Row; 23] = [
    Row { code: CC,      symbol: "CC",  name: "Drastic conjunction",     anchor: pt(2.0),              family: "Conjunctive", subtype: "Hard conjunction", verbalization: MUST_ALL },
    Row { code: HHC,     symbol: "HHC", name: "High hyper-conjunction",  anchor: iv(1.25, 2.0),        family: "Conjunctive", subtype: "Hard conjunction", verbalization: MUST_ALL },
    Row { code: CP,      symbol: "CP",  name: "Product t-norm",          anchor: pt(1.25),             family: "Conjunctive", subtype: "Hard conjunction", verbalization: MUST_ALL },
    Row { code: LHC,     symbol: "LHC", name: "Low hyper-conjunction",   anchor: iv(1.0, 1.25),        family: "Conjunctive", subtype: "Hard conjunction", verbalization: MUST_ALL },
    Row { code: C,       symbol: "C",   name: "Pure conjunction",        anchor: pt(1.0),              family: "Conjunctive", subtype: "Hard conjunction", verbalization: MUST_ALL },
    Row { code: HCPlus,  symbol: "HC+", name: "High hard conjunction",   anchor: pt(13.0 / 14.0),      family: "Conjunctive", subtype: "Hard conjunction", verbalization: MUST_ALL },
    Row { code: HC,      symbol: "HC",  name: "Medium hard conjunction", anchor: pt(12.0 / 14.0),      family: "Conjunctive", subtype: "Hard conjunction", verbalization: MUST_ALL },
    Row { code: HCMinus, symbol: "HC-", name: "Low hard conjunction",    anchor: pt(11.0 / 14.0),      family: "Conjunctive", subtype: "Hard conjunction", verbalization: MUST_ALL },
    Row { code: SCPlus,  symbol: "SC+", name: "High soft conjunction",   anchor: pt(10.0 / 14.0),      family: "Conjunctive", subtype: "Soft conjunction", verbalization: MOST },
    Row { code: SC,      symbol: "SC",  name: "Medium soft conjunction", anchor: pt(9.0 / 14.0),       family: "Conjunctive", subtype: "Soft conjunction", verbalization: MOST },
    Row { code: SCMinus, symbol: "SC-", name: "Low soft conjunction",    anchor: pt(8.0 / 14.0),       family: "Conjunctive", subtype: "Soft conjunction", verbalization: MOST },
    Row { code: A,       symbol: "A",   name: "Logic neutrality",        anchor: pt(7.0 / 14.0),       family: "Neutral",     subtype: "Arithmetic mean",  verbalization: NICE },
    Row { code: SDMinus, symbol: "SD-", name: "Low soft disjunction",    anchor: pt(6.0 / 14.0),       family: "Disjunctive", subtype: "Soft disjunction", verbalization: SOME },
    Row { code: SD,      symbol: "SD",  name: "Medium soft disjunction", anchor: pt(5.0 / 14.0),       family: "Disjunctive", subtype: "Soft disjunction", verbalization: SOME },
    Row { code: SDPlus,  symbol: "SD+", name: "High soft disjunction",   anchor: pt(4.0 / 14.0),       family: "Disjunctive", subtype: "Soft disjunction", verbalization: SOME },
    Row { code: HDMinus, symbol: "HD-", name: "Low hard disjunction",    anchor: pt(3.0 / 14.0),       family: "Disjunctive", subtype: "Hard disjunction", verbalization: ANY },
    Row { code: HD,      symbol: "HD",  name: "Medium hard disjunction", anchor: pt(2.0 / 14.0),       family: "Disjunctive", subtype: "Hard disjunction", verbalization: ANY },
    Row { code: HDPlus,  symbol: "HD+", name: "High hard disjunction",   anchor: pt(1.0 / 14.0),       family: "Disjunctive", subtype: "Hard disjunction", verbalization: ANY },
    Row { code: D,       symbol: "D",   name: "Pure disjunction",        anchor: pt(0.0),              family: "Disjunctive", subtype: "Hard disjunction", verbalization: ANY },
    Row { code: LHD,     symbol: "LHD", name: "Low hyper-disjunction",   anchor: iv(-0.25, 0.0),       family: "Disjunctive", subtype: "Hard disjunction", verbalization: ANY },
    Row { code: DP,      symbol: "DP",  name: "Product t-conorm",        anchor: pt(-0.25),            family: "Disjunctive", subtype: "Hard disjunction", verbalization: ANY },
    Row { code: HHD,     symbol: "HHD", name: "High hyper-disjunction",  anchor: iv(-1.0, -0.25),      family: "Disjunctive", subtype: "Hard disjunction", verbalization: ANY },
    Row { code: DD,      symbol: "DD",  name: "Drastic disjunction",     anchor: pt(-1.0),             family: "Disjunctive", subtype: "Hard disjunction", verbalization: ANY },
];

impl AndnessCode {
    pub const ALL: [AndnessCode; 23] = [
        CC, HHC, CP, LHC, C, HCPlus, HC, HCMinus, SCPlus, SC, SCMinus, A, SDMinus, SD, SDPlus,
        HDMinus, HD, HDPlus, D, LHD, DP, HHD, DD,
    ];

    fn row(self) -> &'static Row {
        &TABLE[self as usize]
    }

    /// Short code as printed in operator tables, e.g. `"HC+"`.
    pub fn symbol(self) -> &'static str {
        self.row().symbol
    }

    pub fn name(self) -> &'static str {
        self.row().name
    }

    pub fn anchor(self) -> AndnessAnchor {
        self.row().anchor
    }

    pub fn verbalization(self) -> &'static str {
        self.row().verbalization
    }

    pub fn family(self) -> &'static str {
        self.row().family
    }

    pub fn subtype(self) -> &'static str {
        self.row().subtype
    }

    /// Markdown rendering of the whole code table.
    pub fn markdown_table() -> String {
        let mut out = String::from(
            "| GCD | Type | Subtype | Code | Name | Andness | Verbalization |\n\
             |--------|--------|--------|--------|--------|--------|--------|\n",
        );
        for row in &TABLE {
            let andness = anchor_label(row.code);
            out.push_str(&format!(
                "| GCD | {} | {} | {} | {} | {} | \"{}\" |\n",
                row.family, row.subtype, row.symbol, row.name, andness, row.verbalization
            ));
        }
        out
    }
}

fn anchor_label(code: AndnessCode) -> &'static str {
    match code {
        CC => "2",
        HHC => "[5/4, 2]",
        CP => "5/4",
        LHC => "[1, 5/4]",
        C => "1",
        HCPlus => "13/14",
        HC => "12/14",
        HCMinus => "11/14",
        SCPlus => "10/14",
        SC => "9/14",
        SCMinus => "8/14",
        A => "7/14",
        SDMinus => "6/14",
        SD => "5/14",
        SDPlus => "4/14",
        HDMinus => "3/14",
        HD => "2/14",
        HDPlus => "1/14",
        D => "0",
        LHD => "[-1/4, 0]",
        DP => "-1/4",
        HHD => "[-1, -1/4]",
        DD => "-1",
    }
}

impl fmt::Display for AndnessCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for AndnessCode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        // Accept the typographic minus some tables use.
        let normalized = s.replace('\u{2212}', "-");
        TABLE
            .iter()
            .find(|r| r.symbol == normalized)
            .map(|r| r.code)
            .ok_or_else(|| Error::Parse(format!("unknown operator code `{s}`")))
    }
}

/// Nearest code on the andness axis.
///
/// Point anchors compete by absolute distance. An `α` strictly inside one of
/// the open interval regions (HHC, LHC, LHD, HHD) is at distance zero from
/// that region, so it maps to the interval code; interval endpoints are point
/// anchors themselves. Ties go to the more conjunctive code.
pub fn andness_to_code<T: Scalar>(alpha: T) -> Result<AndnessCode> {
    let a = alpha.to_f64_lossy();
    if !(-1.0..=2.0).contains(&a) {
        return Err(domain(format!("andness {a} outside [-1, 2]")));
    }
    let mut best = (f64::INFINITY, CC);
    // TABLE is ordered conjunctive-first, so strict `<` keeps the
    // conjunctive code on ties.
    for row in &TABLE {
        let dist = match row.anchor {
            AndnessAnchor::Point(p) => (a - p).abs(),
            AndnessAnchor::Interval(lo, hi) if a > lo && a < hi => 0.0,
            AndnessAnchor::Interval(..) => f64::INFINITY,
        };
        if dist < best.0 {
            best = (dist, row.code);
        }
    }
    Ok(best.1)
}

/// Logical role of an input joined through an aggregator of andness `α`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Mandatory,
    Desired,
    Neutral,
    Optional,
    Sufficient,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Role::Mandatory => "mandatory",
            Role::Desired => "desired",
            Role::Neutral => "neutral",
            Role::Optional => "optional",
            Role::Sufficient => "sufficient",
        };
        f.write_str(s)
    }
}

/// Role bands: `α ≥ 11/14` mandatory, `[8/14, 10/14]` desired, `7/14`
/// neutral, `[4/14, 6/14]` optional, `[-1, 3/14]` sufficient. Values in the
/// gaps snap to the nearest band boundary, conjunctive side on ties.
pub fn classify_role<T: Scalar>(alpha: T) -> Role {
    let a = alpha.to_f64_lossy();
    let x = 1.0 / 14.0;
    // (role, lower bound, upper bound), conjunctive first.
    let bands = [
        (Role::Mandatory, 11.0 * x, f64::INFINITY),
        (Role::Desired, 8.0 * x, 10.0 * x),
        (Role::Neutral, 7.0 * x, 7.0 * x),
        (Role::Optional, 4.0 * x, 6.0 * x),
        (Role::Sufficient, f64::NEG_INFINITY, 3.0 * x),
    ];
    let mut best = (f64::INFINITY, Role::Mandatory);
    for (role, lo, hi) in bands {
        let dist = if a < lo {
            lo - a
        } else if a > hi {
            a - hi
        } else {
            0.0
        };
        // Distances between band edges and α are computed in f64 from
        // multiples of 1/14, so exact midpoints compare equal.
        if dist < best.0 - 1e-12 {
            best = (dist, role);
        }
    }
    best.1
}
