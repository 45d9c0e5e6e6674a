//! Combinatorial description of a central plane arrangement in complex
//! 3-space, viewed as `n` projective lines plus their multiple points.
//!
//! A configuration stores only the points where three or more lines meet;
//! double points are implied, since every pair of projective lines meets
//! exactly once. All invariants here are lattice data: Moebius function,
//! characteristic polynomial, Betti numbers of the cone and projective
//! complements, the closed rank formula for the Milnor fiber boundary, and
//! the multiplicity-vanishing condition that makes the two boundary ranks
//! agree.

use std::fmt;
use std::sync::OnceLock;

use num_integer::Integer;

/// Sorted list of 1-based line labels through one projective point.
pub type Flat = Vec<usize>;

/// `n` projective lines plus every point where at least three meet.
/// Flats are kept canonical: each sorted ascending, the list sorted
/// lexicographically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineConfiguration {
    n: usize,
    flats: Vec<Flat>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum Violation {
    #[error("line index {index} out of range 1..={n} in flat {flat:?}")]
    BadIndex { index: usize, n: usize, flat: Flat },
    #[error("flat {flat:?} lists fewer than three lines; double points are implicit")]
    FlatTooSmall { flat: Flat },
    #[error("flat {flat:?} repeats a line")]
    RepeatedLine { flat: Flat },
    #[error("pair {{{i},{j}}} lies in two flats {flat_a:?} and {flat_b:?}")]
    DuplicatePair {
        i: usize,
        j: usize,
        flat_a: Flat,
        flat_b: Flat,
    },
    #[error("line count must be at least 1")]
    NoLines,
}

impl LineConfiguration {
    /// Validates and canonicalizes. Every violation is reported, not just the
    /// first one found.
    pub fn new(n: usize, flats: Vec<Vec<usize>>) -> Result<Self, Vec<Violation>> {
        let mut violations = Vec::new();
        if n == 0 {
            violations.push(Violation::NoLines);
        }
        let mut canonical: Vec<Flat> = Vec::with_capacity(flats.len());
        for raw in &flats {
            let mut f = raw.clone();
            f.sort_unstable();
            let had_dup = f.windows(2).any(|w| w[0] == w[1]);
            if had_dup {
                violations.push(Violation::RepeatedLine { flat: raw.clone() });
                f.dedup();
            }
            for &i in &f {
                if i == 0 || i > n {
                    violations.push(Violation::BadIndex {
                        index: i,
                        n,
                        flat: raw.clone(),
                    });
                }
            }
            if f.len() < 3 {
                violations.push(Violation::FlatTooSmall { flat: raw.clone() });
            }
            canonical.push(f);
        }
        canonical.sort();
        // each unordered pair of lines may be concurrent at only one point
        let mut seen: std::collections::BTreeMap<(usize, usize), usize> =
            std::collections::BTreeMap::new();
        for (fi, f) in canonical.iter().enumerate() {
            for a in 0..f.len() {
                for b in a + 1..f.len() {
                    let key = (f[a], f[b]);
                    if let Some(&prev) = seen.get(&key) {
                        if canonical[prev] != *f {
                            violations.push(Violation::DuplicatePair {
                                i: key.0,
                                j: key.1,
                                flat_a: canonical[prev].clone(),
                                flat_b: f.clone(),
                            });
                        } else {
                            // identical flat listed twice counts once per pair;
                            // report it as a duplicate of itself
                            violations.push(Violation::DuplicatePair {
                                i: key.0,
                                j: key.1,
                                flat_a: f.clone(),
                                flat_b: f.clone(),
                            });
                        }
                    } else {
                        seen.insert(key, fi);
                    }
                }
            }
        }
        if !violations.is_empty() {
            violations.dedup();
            return Err(violations);
        }
        canonical.dedup();
        Ok(LineConfiguration {
            n,
            flats: canonical,
        })
    }

    #[must_use]
    pub fn n(&self) -> usize {
        self.n
    }

    /// The flats of multiplicity at least three, exactly as validated.
    #[must_use]
    pub fn listed_flats(&self) -> &[Flat] {
        &self.flats
    }

    /// All rank-two flats: the listed multiple points plus one implicit double
    /// point for every remaining pair, in lexicographic order. Every pair of
    /// lines appears in exactly one returned flat.
    #[must_use]
    pub fn l2_flats(&self) -> Vec<Flat> {
        let mut covered = std::collections::BTreeSet::new();
        for f in &self.flats {
            for a in 0..f.len() {
                for b in a + 1..f.len() {
                    covered.insert((f[a], f[b]));
                }
            }
        }
        let mut out = self.flats.clone();
        for i in 1..=self.n {
            for j in i + 1..=self.n {
                if !covered.contains(&(i, j)) {
                    out.push(vec![i, j]);
                }
            }
        }
        out.sort();
        out
    }

    /// Count of points of each multiplicity `k` for `k = 3..=n`, plus the
    /// implicit double points.
    #[must_use]
    pub fn multiplicity_tuple(&self) -> MultiplicityTuple {
        let mut counts = vec![0usize; self.n.saturating_sub(2)];
        let mut doubles = 0usize;
        for f in self.l2_flats() {
            if f.len() == 2 {
                doubles += 1;
            } else {
                counts[f.len() - 3] += 1;
            }
        }
        MultiplicityTuple {
            n: self.n,
            counts,
            double_points: doubles,
        }
    }

    /// Rank of the central arrangement: 1 for a single plane, 2 when all
    /// lines share one projective point, 3 otherwise.
    #[must_use]
    pub fn rank(&self) -> usize {
        if self.n == 1 {
            1
        } else if self.l2_flats().iter().any(|f| f.len() == self.n) {
            2
        } else {
            3
        }
    }

    /// Moebius function over the full intersection poset, computed by the
    /// defining recursion level by level: the ambient space, the planes, the
    /// rank-two flats, and (when the rank is 3) the origin.
    #[must_use]
    pub fn betti(&self) -> BettiProfile {
        let l2 = self.l2_flats();
        // mu(ambient) = 1; mu(plane) = -mu(ambient) = -1
        // mu(X) = -(mu(ambient) + sum of mu over the planes through X)
        let mu_l2: Vec<i64> = l2.iter().map(|f| -(1i64 + -(f.len() as i64))).collect();
        let sum_l2: i64 = mu_l2.iter().sum();
        let mu_origin = if self.rank() == 3 {
            -(1i64 - self.n as i64 + sum_l2)
        } else {
            0
        };
        let b_m = [
            1usize,
            self.n,
            usize::try_from(sum_l2).expect("level-two Moebius sum is positive"),
            usize::try_from(-mu_origin).expect("origin Moebius has sign (-1)^3"),
        ];
        let b1_u = self.n - 1;
        let b2_u = b_m[2] - b1_u;
        // the two Betti ladders are glued by b_k(cone) = b_k + b_{k-1} here
        debug_assert_eq!(b_m[3], b2_u);
        let b_u = [1usize, b1_u, b2_u];
        BettiProfile {
            b_cone: b_m,
            b_projective: b_u,
            chi_projective: 1 - b1_u as i64 + b2_u as i64,
            charpoly: [1, -(self.n as i64), sum_l2, mu_origin],
        }
    }

    /// First Betti number of the Milnor fiber boundary by the closed formula:
    /// a summand `1 + (|X|-2) gcd(|X|, n)` per rank-two flat `X`.
    #[must_use]
    pub fn b1_milnor_boundary(&self) -> usize {
        self.l2_flats()
            .iter()
            .map(|f| 1 + (f.len() - 2) * f.len().gcd(&self.n))
            .sum()
    }

    /// True when `(|X|-2)(gcd(|X|,n)-1) = 0` for every rank-two flat: each
    /// point is double or has multiplicity coprime to `n`.
    #[must_use]
    pub fn assumption_star(&self) -> bool {
        self.l2_flats()
            .iter()
            .all(|f| f.len() == 2 || f.len().gcd(&self.n) == 1)
    }

    // ==== the `.arr` file format ====

    /// Canonical text form: an `n` line, then one `flat` line per multiple
    /// point. Parsing the output reproduces the configuration byte for byte.
    #[must_use]
    pub fn to_arr_string(&self) -> String {
        let mut s = format!("n {}\n", self.n);
        for f in &self.flats {
            s.push_str("flat");
            for i in f {
                s.push(' ');
                s.push_str(&i.to_string());
            }
            s.push('\n');
        }
        s
    }

    pub fn from_arr_str(text: &str) -> Result<Self, ArrError> {
        let mut n: Option<usize> = None;
        let mut n_line = 0usize;
        let mut flats: Vec<(usize, Vec<usize>)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut tokens = line.split_whitespace();
            match tokens.next() {
                Some("n") => {
                    if n.is_some() {
                        return Err(ArrError::parse(line_no, "repeated `n` line"));
                    }
                    let rest: Vec<&str> = tokens.collect();
                    if rest.len() != 1 {
                        return Err(ArrError::parse(line_no, "expected `n <count>`"));
                    }
                    let value: usize = rest[0].parse().map_err(|_| {
                        ArrError::parse(line_no, format!("bad line count `{}`", rest[0]))
                    })?;
                    n = Some(value);
                    n_line = line_no;
                }
                Some("flat") => {
                    if n.is_none() {
                        return Err(ArrError::parse(line_no, "`flat` line before the `n` line"));
                    }
                    let mut flat = Vec::new();
                    for t in tokens {
                        let v: usize = t.parse().map_err(|_| {
                            ArrError::parse(line_no, format!("bad line label `{t}`"))
                        })?;
                        flat.push(v);
                    }
                    flats.push((line_no, flat));
                }
                Some(other) => {
                    return Err(ArrError::parse(
                        line_no,
                        format!("unknown directive `{other}`"),
                    ));
                }
                None => unreachable!("blank lines were skipped"),
            }
        }
        let Some(n) = n else {
            return Err(ArrError::parse(n_line.max(1), "missing `n` line"));
        };
        let raw_flats: Vec<Vec<usize>> = flats.iter().map(|(_, f)| f.clone()).collect();
        LineConfiguration::new(n, raw_flats).map_err(|violations| {
            let lines = flats
                .iter()
                .map(|(line_no, f)| {
                    let mut sorted = f.clone();
                    sorted.sort_unstable();
                    (sorted, *line_no)
                })
                .collect::<Vec<_>>();
            ArrError::Invalid {
                violations: violations
                    .into_iter()
                    .map(|v| {
                        let line = flat_of_violation(&v)
                            .and_then(|f| {
                                let mut sf = f.clone();
                                sf.sort_unstable();
                                lines.iter().find(|(g, _)| *g == sf).map(|(_, l)| *l)
                            })
                            .unwrap_or(0);
                        (line, v)
                    })
                    .collect(),
            }
        })
    }
}

fn flat_of_violation(v: &Violation) -> Option<&Flat> {
    match v {
        Violation::BadIndex { flat, .. }
        | Violation::FlatTooSmall { flat }
        | Violation::RepeatedLine { flat } => Some(flat),
        Violation::DuplicatePair { flat_b, .. } => Some(flat_b),
        Violation::NoLines => None,
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ArrError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid configuration: {}", format_violations(violations))]
    Invalid { violations: Vec<(usize, Violation)> },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl ArrError {
    fn parse(line: usize, message: impl Into<String>) -> Self {
        ArrError::Parse {
            line,
            message: message.into(),
        }
    }
}

fn format_violations(violations: &[(usize, Violation)]) -> String {
    violations
        .iter()
        .map(|(line, v)| {
            if *line > 0 {
                format!("line {line}: {v}")
            } else {
                v.to_string()
            }
        })
        .collect::<Vec<_>>()
        .join("; ")
}

pub fn read_arr_file(path: &std::path::Path) -> Result<LineConfiguration, ArrError> {
    let text = std::fs::read_to_string(path)?;
    LineConfiguration::from_arr_str(&text)
}

pub fn write_arr_file(config: &LineConfiguration, path: &std::path::Path) -> Result<(), ArrError> {
    std::fs::write(path, config.to_arr_string())?;
    Ok(())
}

// ==== derived summaries ====

/// Point counts by multiplicity: `counts[k-3]` points where exactly `k` lines
/// meet, for `k = 3..=n`, plus the number of implicit double points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiplicityTuple {
    pub n: usize,
    pub counts: Vec<usize>,
    pub double_points: usize,
}

impl fmt::Display for MultiplicityTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let inner = self
            .counts
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(",");
        write!(f, "({inner})")
    }
}

/// Betti numbers of both complements plus the characteristic polynomial.
/// `b_cone` covers the complement in complex 3-space, `b_projective` its
/// projective quotient; `charpoly` holds coefficients by descending degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BettiProfile {
    pub b_cone: [usize; 4],
    pub b_projective: [usize; 3],
    pub chi_projective: i64,
    pub charpoly: [i64; 4],
}

// ==== catalog ====

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CatalogEntry {
    /// Only double points.
    Generic(usize),
    /// All lines through one point.
    Pencil(usize),
    /// Lines `1..n` through one point, line `n` generic.
    NearPencil(usize),
    /// The unique 8-line configuration with eight triple points, three per
    /// line; realizable over the complex numbers but not the reals.
    MacLane,
    /// Arbitrary listed multiple points on `n` lines.
    WithConcurrencies { n: usize, flats: Vec<Vec<usize>> },
}

#[derive(Debug, thiserror::Error)]
pub enum CatalogError {
    #[error("unknown catalog entry `{0}`")]
    NoSuchEntry(String),
    #[error("bad catalog parameters: {0}")]
    BadParams(String),
    #[error("catalog entry is not a valid configuration: {0:?}")]
    Invalid(Vec<Violation>),
}

pub fn catalog(entry: &CatalogEntry) -> Result<LineConfiguration, CatalogError> {
    match entry {
        CatalogEntry::Generic(n) => {
            if *n == 0 {
                return Err(CatalogError::BadParams("generic needs n >= 1".into()));
            }
            LineConfiguration::new(*n, vec![]).map_err(CatalogError::Invalid)
        }
        CatalogEntry::Pencil(n) => {
            if *n < 3 {
                return Err(CatalogError::BadParams(
                    "pencil needs n >= 3; fewer lines have no listed point".into(),
                ));
            }
            LineConfiguration::new(*n, vec![(1..=*n).collect()]).map_err(CatalogError::Invalid)
        }
        CatalogEntry::NearPencil(n) => {
            if *n < 4 {
                return Err(CatalogError::BadParams(
                    "near_pencil needs n >= 4; below that it degenerates".into(),
                ));
            }
            LineConfiguration::new(*n, vec![(1..*n).collect()]).map_err(CatalogError::Invalid)
        }
        CatalogEntry::MacLane => {
            LineConfiguration::new(8, maclane_triples().clone()).map_err(CatalogError::Invalid)
        }
        CatalogEntry::WithConcurrencies { n, flats } => {
            LineConfiguration::new(*n, flats.clone()).map_err(CatalogError::Invalid)
        }
    }
}

/// Parses the CLI catalog syntax: `generic:8`, `pencil:8`, `near_pencil:8`,
/// `maclane`, `with_concurrencies:8:1,2,3;1,4,5`.
pub fn parse_catalog_spec(spec: &str) -> Result<CatalogEntry, CatalogError> {
    let mut parts = spec.splitn(3, ':');
    let name = parts.next().unwrap_or("");
    let arg = parts.next();
    let rest = parts.next();
    let parse_n = |arg: Option<&str>| -> Result<usize, CatalogError> {
        let a = arg.ok_or_else(|| {
            CatalogError::BadParams(format!("`{name}` needs a line count, e.g. `{name}:8`"))
        })?;
        a.parse()
            .map_err(|_| CatalogError::BadParams(format!("bad line count `{a}`")))
    };
    match name {
        "generic" => Ok(CatalogEntry::Generic(parse_n(arg)?)),
        "pencil" => Ok(CatalogEntry::Pencil(parse_n(arg)?)),
        "near_pencil" => Ok(CatalogEntry::NearPencil(parse_n(arg)?)),
        "maclane" => {
            if arg.is_some() {
                return Err(CatalogError::BadParams(
                    "maclane takes no parameters".into(),
                ));
            }
            Ok(CatalogEntry::MacLane)
        }
        "with_concurrencies" => {
            let n = parse_n(arg)?;
            let flats_text = rest.ok_or_else(|| {
                CatalogError::BadParams(
                    "with_concurrencies needs flats, e.g. `with_concurrencies:8:1,2,3;1,4,5`"
                        .into(),
                )
            })?;
            let mut flats = Vec::new();
            for part in flats_text.split(';') {
                let mut flat = Vec::new();
                for tok in part.split(',') {
                    let v: usize = tok
                        .trim()
                        .parse()
                        .map_err(|_| CatalogError::BadParams(format!("bad line label `{tok}`")))?;
                    flat.push(v);
                }
                flats.push(flat);
            }
            Ok(CatalogEntry::WithConcurrencies { n, flats })
        }
        other => Err(CatalogError::NoSuchEntry(other.to_string())),
    }
}

/// Exhaustive lexicographic search for the triple system: 8 triples on 8
/// lines, every line on exactly 3 of them, no pair repeated. The first hit is
/// cached; it is the unique such system up to relabeling.
fn maclane_triples() -> &'static Vec<Vec<usize>> {
    static FOUND: OnceLock<Vec<Vec<usize>>> = OnceLock::new();
    FOUND.get_or_init(|| {
        let mut candidates = Vec::new();
        for a in 1..=8usize {
            for b in a + 1..=8 {
                for c in b + 1..=8 {
                    candidates.push(vec![a, b, c]);
                }
            }
        }
        let mut chosen: Vec<usize> = Vec::new();
        let mut line_count = [0usize; 9];
        let mut pair_used = [[false; 9]; 9];
        fn ok(t: &[usize], line_count: &[usize; 9], pair_used: &[[bool; 9]; 9]) -> bool {
            t.iter().all(|&l| line_count[l] < 3)
                && !pair_used[t[0]][t[1]]
                && !pair_used[t[0]][t[2]]
                && !pair_used[t[1]][t[2]]
        }
        fn dfs(
            candidates: &[Vec<usize>],
            start: usize,
            chosen: &mut Vec<usize>,
            line_count: &mut [usize; 9],
            pair_used: &mut [[bool; 9]; 9],
        ) -> bool {
            if chosen.len() == 8 {
                return line_count[1..=8].iter().all(|&c| c == 3);
            }
            // every line still needs (3 - count) slots; the remaining
            // triples supply 3 slots each
            let deficit: usize = (1..=8).map(|l| 3 - line_count[l]).sum();
            if deficit != 3 * (8 - chosen.len()) {
                return false;
            }
            for idx in start..candidates.len() {
                let t = &candidates[idx];
                if !ok(t, line_count, pair_used) {
                    continue;
                }
                chosen.push(idx);
                for &l in t {
                    line_count[l] += 1;
                }
                pair_used[t[0]][t[1]] = true;
                pair_used[t[0]][t[2]] = true;
                pair_used[t[1]][t[2]] = true;
                if dfs(candidates, idx + 1, chosen, line_count, pair_used) {
                    return true;
                }
                pair_used[t[0]][t[1]] = false;
                pair_used[t[0]][t[2]] = false;
                pair_used[t[1]][t[2]] = false;
                for &l in t {
                    line_count[l] -= 1;
                }
                chosen.pop();
            }
            false
        }
        let found = dfs(&candidates, 0, &mut chosen, &mut line_count, &mut pair_used);
        assert!(found, "triple-system search must succeed");
        chosen.iter().map(|&i| candidates[i].clone()).collect()
    })
}
