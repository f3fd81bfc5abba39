//! Finite groupoids: validation, structure queries and standard constructors.
//!
//! Composition follows function-composition order: `(g1, g2)` is composable
//! iff `r(g2) = s(g1)`, and the product `g1 g2` runs from `s(g2)` to `r(g1)`.
//! Arrows and base points keep the order in which they were declared, and
//! every matrix built downstream uses that order.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of an arrow in canonical order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Arrow(pub usize);

/// Index of a base point in canonical order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point(pub usize);

impl Arrow {
    pub fn index(self) -> usize {
        self.0
    }
}

impl Point {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawArrow {
    pub id: String,
    pub s: String,
    pub r: String,
}

/// Groupoid data as it appears in a project file, before any checking.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawGroupoid {
    pub base_points: Vec<String>,
    pub arrows: Vec<RawArrow>,
    pub units: BTreeMap<String, String>,
    pub inverse: BTreeMap<String, String>,
    /// `[g1, g2, g1 g2]`; omitted for non-composable pairs.
    #[serde(default)]
    pub product: Vec<[String; 3]>,
}

/// Escapes one JSON-pointer reference token.
pub(crate) fn pointer_token(s: &str) -> String {
    s.replace('~', "~0").replace('/', "~1")
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Tables {
    points: Vec<String>,
    arrows: Vec<String>,
    source: Vec<usize>,
    range: Vec<usize>,
    unit: Vec<usize>,
    inverse: Vec<usize>,
    // row-major over (g1, g2)
    product: Vec<Option<usize>>,
}

impl Tables {
    fn resolve(raw: &RawGroupoid) -> Result<Self> {
        let mut point_index = HashMap::new();
        for (i, p) in raw.base_points.iter().enumerate() {
            if point_index.insert(p.as_str(), i).is_some() {
                return Err(Error::DuplicateIdentifier {
                    path: format!("/base_points/{i}"),
                    id: p.clone(),
                });
            }
        }
        let mut arrow_index = HashMap::new();
        let mut source = Vec::with_capacity(raw.arrows.len());
        let mut range = Vec::with_capacity(raw.arrows.len());
        for (i, a) in raw.arrows.iter().enumerate() {
            if arrow_index.insert(a.id.as_str(), i).is_some() {
                return Err(Error::DuplicateIdentifier {
                    path: format!("/arrows/{i}/id"),
                    id: a.id.clone(),
                });
            }
            let lookup = |id: &str, field: &str| {
                point_index
                    .get(id)
                    .copied()
                    .ok_or_else(|| Error::UnknownIdentifier {
                        path: format!("/arrows/{i}/{field}"),
                        id: id.to_string(),
                    })
            };
            source.push(lookup(&a.s, "s")?);
            range.push(lookup(&a.r, "r")?);
        }
        let arrow_at = |id: &str, path: String| {
            arrow_index
                .get(id)
                .copied()
                .ok_or_else(|| Error::UnknownIdentifier {
                    path,
                    id: id.to_string(),
                })
        };

        let mut unit = vec![usize::MAX; raw.base_points.len()];
        for (x, a) in &raw.units {
            let path = format!("/units/{}", pointer_token(x));
            let xi = *point_index
                .get(x.as_str())
                .ok_or_else(|| Error::UnknownIdentifier {
                    path: path.clone(),
                    id: x.clone(),
                })?;
            unit[xi] = arrow_at(a, path)?;
        }
        if let Some(x) = unit.iter().position(|&u| u == usize::MAX) {
            return Err(Error::Schema {
                path: "/units".into(),
                message: format!("missing unit for base point `{}`", raw.base_points[x]),
            });
        }

        let mut inverse = vec![usize::MAX; raw.arrows.len()];
        for (a, b) in &raw.inverse {
            let path = format!("/inverse/{}", pointer_token(a));
            let ai = arrow_at(a, path.clone())?;
            inverse[ai] = arrow_at(b, path)?;
        }
        if let Some(a) = inverse.iter().position(|&u| u == usize::MAX) {
            return Err(Error::Schema {
                path: "/inverse".into(),
                message: format!("missing inverse for arrow `{}`", raw.arrows[a].id),
            });
        }

        let n = raw.arrows.len();
        let mut product = vec![None; n * n];
        for (k, [g1, g2, g12]) in raw.product.iter().enumerate() {
            let a = arrow_at(g1, format!("/product/{k}/0"))?;
            let b = arrow_at(g2, format!("/product/{k}/1"))?;
            let c = arrow_at(g12, format!("/product/{k}/2"))?;
            if product[a * n + b].replace(c).is_some() {
                return Err(Error::Schema {
                    path: format!("/product/{k}"),
                    message: format!("product of `{g1}` and `{g2}` given twice"),
                });
            }
        }

        Ok(Self {
            points: raw.base_points.clone(),
            arrows: raw.arrows.iter().map(|a| a.id.clone()).collect(),
            source,
            range,
            unit,
            inverse,
            product,
        })
    }

    fn n(&self) -> usize {
        self.arrows.len()
    }

    fn mul(&self, a: usize, b: usize) -> Option<usize> {
        self.product[a * self.n() + b]
    }

    fn check_axioms(&self) -> Vec<Violation> {
        let n = self.n();
        let mut out = Vec::new();
        let arrow = |a: usize| self.arrows[a].clone();

        for (x, name) in self.points.iter().enumerate() {
            if !self.source.contains(&x) {
                out.push(Violation::new(
                    Axiom::SourceSurjective,
                    vec![name.clone()],
                    "no arrow starts here",
                ));
            }
            if !self.range.contains(&x) {
                out.push(Violation::new(
                    Axiom::RangeSurjective,
                    vec![name.clone()],
                    "no arrow ends here",
                ));
            }
            let u = self.unit[x];
            if self.source[u] != x || self.range[u] != x {
                out.push(Violation::new(
                    Axiom::UnitEndpoints,
                    vec![name.clone(), arrow(u)],
                    "unit does not start and end at its base point",
                ));
            }
        }

        for a in 0..n {
            for b in 0..n {
                let composable = self.range[b] == self.source[a];
                match (composable, self.mul(a, b)) {
                    (true, None) => out.push(Violation::new(
                        Axiom::ProductDomain,
                        vec![arrow(a), arrow(b)],
                        "composable pair has no product",
                    )),
                    (false, Some(_)) => out.push(Violation::new(
                        Axiom::ProductDomain,
                        vec![arrow(a), arrow(b)],
                        "product given for a non-composable pair",
                    )),
                    (true, Some(c)) => {
                        if self.source[c] != self.source[b] || self.range[c] != self.range[a] {
                            out.push(Violation::new(
                                Axiom::ProductEndpoints,
                                vec![arrow(a), arrow(b), arrow(c)],
                                "s(ab) != s(b) or r(ab) != r(a)",
                            ));
                        }
                    }
                    (false, None) => {}
                }
            }
        }

        for g in 0..n {
            let left = self.mul(self.unit[self.range[g]], g);
            let right = self.mul(g, self.unit[self.source[g]]);
            if left != Some(g) || right != Some(g) {
                out.push(Violation::new(
                    Axiom::UnitLaw,
                    vec![arrow(g)],
                    "e(r(g)) g = g = g e(s(g)) fails",
                ));
            }
            let inv = self.inverse[g];
            if self.mul(inv, g) != Some(self.unit[self.source[g]])
                || self.mul(g, inv) != Some(self.unit[self.range[g]])
            {
                out.push(Violation::new(
                    Axiom::Inverse,
                    vec![arrow(g), arrow(inv)],
                    "g^-1 g = e(s(g)) and g g^-1 = e(r(g)) fail",
                ));
            }
        }

        for a in 0..n {
            for b in 0..n {
                let Some(ab) = self.mul(a, b) else { continue };
                for c in 0..n {
                    let Some(bc) = self.mul(b, c) else { continue };
                    let (Some(lhs), Some(rhs)) = (self.mul(ab, c), self.mul(a, bc)) else {
                        continue;
                    };
                    if lhs != rhs {
                        out.push(Violation::new(
                            Axiom::Associativity,
                            vec![arrow(a), arrow(b), arrow(c)],
                            format!("(ab)c = {} but a(bc) = {}", arrow(lhs), arrow(rhs)),
                        ));
                    }
                }
            }
        }
        out
    }
}

/// Groupoid axiom checked by [`validate_groupoid`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    SourceSurjective,
    RangeSurjective,
    UnitEndpoints,
    ProductDomain,
    ProductEndpoints,
    UnitLaw,
    Inverse,
    Associativity,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub axiom: Axiom,
    pub witness: Vec<String>,
    pub detail: String,
}

impl Violation {
    fn new(axiom: Axiom, witness: Vec<String>, detail: impl Into<String>) -> Self {
        Self {
            axiom,
            witness,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroupoidValidation {
    pub passed: bool,
    pub base_points: usize,
    pub arrows: usize,
    pub violations: Vec<Violation>,
}

/// Runs every axiom check on raw groupoid data. Dangling identifiers are
/// returned as errors; axiom failures are listed in the report.
pub fn validate_groupoid(raw: &RawGroupoid) -> Result<GroupoidValidation> {
    let t = Tables::resolve(raw)?;
    let violations = t.check_axioms();
    Ok(GroupoidValidation {
        passed: violations.is_empty(),
        base_points: t.points.len(),
        arrows: t.arrows.len(),
        violations,
    })
}

/// Fibers, hom-sets, isotropy and orbit of one base point, by label.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FiberStructure {
    pub point: String,
    /// Arrows ending at the point.
    pub out_fiber: Vec<String>,
    /// Arrows starting at the point.
    pub in_fiber: Vec<String>,
    /// Arrows from the point to each `y` of its orbit.
    pub hom_sets: Vec<(String, Vec<String>)>,
    pub isotropy: Vec<String>,
    pub orbit: Vec<String>,
}

/// Multiplication table of a finite group: `table[i][j]` is the index of
/// `elements[i] * elements[j]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupTable {
    pub elements: Vec<String>,
    pub table: Vec<Vec<usize>>,
}

impl GroupTable {
    /// The cyclic group of order `n` with elements `"0", …, "n-1"`.
    pub fn cyclic(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("cyclic group of order 0".into()));
        }
        Ok(Self {
            elements: (0..n).map(|i| i.to_string()).collect(),
            table: (0..n)
                .map(|i| (0..n).map(|j| (i + j) % n).collect())
                .collect(),
        })
    }

    /// Checks the group axioms and returns the index of the identity.
    pub fn validate(&self) -> Result<usize> {
        let n = self.elements.len();
        let fail = |axiom: &str, detail: String| Error::InvalidGroup {
            axiom: axiom.into(),
            detail,
        };
        if n == 0 {
            return Err(fail("nonempty", "no elements".into()));
        }
        if self.table.len() != n || self.table.iter().any(|row| row.len() != n) {
            return Err(fail("closure", format!("table must be {n}x{n}")));
        }
        if let Some((i, j)) = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .find(|&(i, j)| self.table[i][j] >= n)
        {
            return Err(fail(
                "closure",
                format!(
                    "{} * {} is out of range",
                    self.elements[i], self.elements[j]
                ),
            ));
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if self.table[self.table[a][b]][c] != self.table[a][self.table[b][c]] {
                        return Err(fail(
                            "associativity",
                            format!(
                                "({0} {1}) {2} != {0} ({1} {2})",
                                self.elements[a], self.elements[b], self.elements[c]
                            ),
                        ));
                    }
                }
            }
        }
        let e = (0..n)
            .find(|&e| (0..n).all(|g| self.table[e][g] == g && self.table[g][e] == g))
            .ok_or_else(|| fail("identity", "no two-sided identity".into()))?;
        for g in 0..n {
            if !(0..n).any(|h| self.table[g][h] == e && self.table[h][g] == e) {
                return Err(fail(
                    "inverse",
                    format!("{} has no inverse", self.elements[g]),
                ));
            }
        }
        Ok(e)
    }
}

/// A finite groupoid whose axioms have been verified.
#[derive(Clone, Debug)]
pub struct FiniteGroupoid {
    t: Tables,
    arrow_index: HashMap<String, usize>,
    point_index: HashMap<String, usize>,
    out_fibers: Vec<Vec<Arrow>>,
    in_fibers: Vec<Vec<Arrow>>,
    fiber_position: Vec<usize>,
}

impl PartialEq for FiniteGroupoid {
    fn eq(&self, other: &Self) -> bool {
        self.t == other.t
    }
}

impl fmt::Display for FiniteGroupoid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "groupoid with {} arrows over {} base points",
            self.arrow_count(),
            self.point_count()
        )
    }
}

impl FiniteGroupoid {
    fn from_tables(t: Tables) -> Result<Self> {
        let violations = t.check_axioms();
        if let Some(v) = violations.first() {
            return Err(Error::AxiomViolation(format!(
                "{} violation(s), first: {:?} at {:?} ({})",
                violations.len(),
                v.axiom,
                v.witness,
                v.detail
            )));
        }
        let arrow_index = t
            .arrows
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), i))
            .collect();
        let point_index = t
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i))
            .collect();
        let mut out_fibers = vec![Vec::new(); t.points.len()];
        let mut in_fibers = vec![Vec::new(); t.points.len()];
        let mut fiber_position = vec![0; t.arrows.len()];
        for a in 0..t.arrows.len() {
            fiber_position[a] = out_fibers[t.range[a]].len();
            out_fibers[t.range[a]].push(Arrow(a));
            in_fibers[t.source[a]].push(Arrow(a));
        }
        Ok(Self {
            t,
            arrow_index,
            point_index,
            out_fibers,
            in_fibers,
            fiber_position,
        })
    }

    /// Resolves identifiers and checks every axiom.
    pub fn from_raw(raw: &RawGroupoid) -> Result<Self> {
        Self::from_tables(Tables::resolve(raw)?)
    }

    pub fn to_raw(&self) -> RawGroupoid {
        let t = &self.t;
        let arrows = (0..t.arrows.len())
            .map(|a| RawArrow {
                id: t.arrows[a].clone(),
                s: t.points[t.source[a]].clone(),
                r: t.points[t.range[a]].clone(),
            })
            .collect();
        let units = (0..t.points.len())
            .map(|x| (t.points[x].clone(), t.arrows[t.unit[x]].clone()))
            .collect();
        let inverse = (0..t.arrows.len())
            .map(|a| (t.arrows[a].clone(), t.arrows[t.inverse[a]].clone()))
            .collect();
        let n = t.arrows.len();
        let mut product = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if let Some(c) = t.mul(a, b) {
                    product.push([
                        t.arrows[a].clone(),
                        t.arrows[b].clone(),
                        t.arrows[c].clone(),
                    ]);
                }
            }
        }
        RawGroupoid {
            base_points: t.points.clone(),
            arrows,
            units,
            inverse,
            product,
        }
    }

    /// Same groupoid with arrows renamed, in canonical order.
    pub fn with_arrow_labels<S: AsRef<str>>(&self, labels: &[S]) -> Result<Self> {
        if labels.len() != self.arrow_count() {
            return Err(Error::InvalidArgument(format!(
                "expected {} arrow labels, got {}",
                self.arrow_count(),
                labels.len()
            )));
        }
        let mut t = self.t.clone();
        t.arrows = labels.iter().map(|s| s.as_ref().to_string()).collect();
        let mut seen = std::collections::HashSet::new();
        if let Some(dup) = t.arrows.iter().find(|a| !seen.insert(a.as_str())) {
            return Err(Error::DuplicateIdentifier {
                path: "/arrows".into(),
                id: dup.clone(),
            });
        }
        Self::from_tables(t)
    }

    pub fn arrow_count(&self) -> usize {
        self.t.arrows.len()
    }

    pub fn point_count(&self) -> usize {
        self.t.points.len()
    }

    pub fn arrows(&self) -> impl ExactSizeIterator<Item = Arrow> {
        (0..self.arrow_count()).map(Arrow)
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = Point> {
        (0..self.point_count()).map(Point)
    }

    pub fn arrow_labels(&self) -> &[String] {
        &self.t.arrows
    }

    pub fn point_labels(&self) -> &[String] {
        &self.t.points
    }

    pub fn arrow_label(&self, a: Arrow) -> &str {
        &self.t.arrows[a.0]
    }

    pub fn point_label(&self, x: Point) -> &str {
        &self.t.points[x.0]
    }

    pub fn arrow(&self, id: &str) -> Result<Arrow> {
        self.arrow_index
            .get(id)
            .map(|&i| Arrow(i))
            .ok_or_else(|| Error::UnknownArrow(id.to_string()))
    }

    pub fn point(&self, id: &str) -> Result<Point> {
        self.point_index
            .get(id)
            .map(|&i| Point(i))
            .ok_or_else(|| Error::UnknownBasePoint(id.to_string()))
    }

    pub fn source(&self, a: Arrow) -> Point {
        Point(self.t.source[a.0])
    }

    pub fn range(&self, a: Arrow) -> Point {
        Point(self.t.range[a.0])
    }

    pub fn unit(&self, x: Point) -> Arrow {
        Arrow(self.t.unit[x.0])
    }

    pub fn inverse(&self, a: Arrow) -> Arrow {
        Arrow(self.t.inverse[a.0])
    }

    pub fn is_unit(&self, a: Arrow) -> bool {
        self.unit(self.source(a)) == a
    }

    /// `g1 g2` if `r(g2) = s(g1)`.
    pub fn product(&self, g1: Arrow, g2: Arrow) -> Option<Arrow> {
        self.t.mul(g1.0, g2.0).map(Arrow)
    }

    pub fn compose(&self, g1: Arrow, g2: Arrow) -> Result<Arrow> {
        self.product(g1, g2).ok_or_else(|| Error::NotComposable {
            first: self.arrow_label(g1).to_string(),
            second: self.arrow_label(g2).to_string(),
            range_of_second: self.point_label(self.range(g2)).to_string(),
            source_of_first: self.point_label(self.source(g1)).to_string(),
        })
    }

    /// Arrows ending at `x` (the range fiber), in canonical order.
    pub fn out_fiber(&self, x: Point) -> &[Arrow] {
        &self.out_fibers[x.0]
    }

    /// Arrows starting at `x` (the source fiber), in canonical order.
    pub fn in_fiber(&self, x: Point) -> &[Arrow] {
        &self.in_fibers[x.0]
    }

    /// Position of `a` inside the range fiber of `r(a)`.
    pub fn out_fiber_position(&self, a: Arrow) -> usize {
        self.fiber_position[a.0]
    }

    /// Position of `a` inside the source fiber of `s(a)`.
    pub fn in_fiber_position(&self, a: Arrow) -> usize {
        self.in_fibers[self.t.source[a.0]]
            .iter()
            .position(|&b| b == a)
            .expect("arrow belongs to its source fiber")
    }

    /// Arrows from `x` to `y`.
    pub fn hom_set(&self, x: Point, y: Point) -> Vec<Arrow> {
        self.in_fiber(x)
            .iter()
            .copied()
            .filter(|&a| self.range(a) == y)
            .collect()
    }

    pub fn isotropy(&self, x: Point) -> Vec<Arrow> {
        self.hom_set(x, x)
    }

    /// `r(Γ_x)`, in canonical point order.
    pub fn orbit(&self, x: Point) -> Vec<Point> {
        let mut hit = vec![false; self.point_count()];
        for &a in self.in_fiber(x) {
            hit[self.range(a).0] = true;
        }
        hit.iter()
            .enumerate()
            .filter(|(_, &h)| h)
            .map(|(i, _)| Point(i))
            .collect()
    }

    /// Orbits ordered by their first base point.
    pub fn orbits(&self) -> Vec<Vec<Point>> {
        let mut seen = vec![false; self.point_count()];
        let mut out = Vec::new();
        for x in self.points() {
            if seen[x.0] {
                continue;
            }
            let orbit = self.orbit(x);
            for y in &orbit {
                seen[y.0] = true;
            }
            out.push(orbit);
        }
        out
    }

    pub fn is_transitive(&self) -> bool {
        self.point_count() > 0 && self.orbit(Point(0)).len() == self.point_count()
    }

    /// True when there is a single base point.
    pub fn is_group(&self) -> bool {
        self.point_count() == 1
    }

    pub fn fibers(&self, x: Point) -> FiberStructure {
        let labels = |v: &[Arrow]| {
            v.iter()
                .map(|&a| self.arrow_label(a).to_string())
                .collect::<Vec<_>>()
        };
        let orbit = self.orbit(x);
        FiberStructure {
            point: self.point_label(x).to_string(),
            out_fiber: labels(self.out_fiber(x)),
            in_fiber: labels(self.in_fiber(x)),
            hom_sets: orbit
                .iter()
                .map(|&y| (self.point_label(y).to_string(), labels(&self.hom_set(x, y))))
                .collect(),
            isotropy: labels(&self.isotropy(x)),
            orbit: orbit
                .iter()
                .map(|&y| self.point_label(y).to_string())
                .collect(),
        }
    }

    pub fn fibers_of(&self, id: &str) -> Result<FiberStructure> {
        Ok(self.fibers(self.point(id)?))
    }

    /// Multiplication table of the isotropy group at `x`.
    pub fn isotropy_table(&self, x: Point) -> GroupTable {
        let iso = self.isotropy(x);
        let pos: HashMap<Arrow, usize> = iso.iter().enumerate().map(|(i, &a)| (a, i)).collect();
        GroupTable {
            elements: iso
                .iter()
                .map(|&a| self.arrow_label(a).to_string())
                .collect(),
            table: iso
                .iter()
                .map(|&a| {
                    iso.iter()
                        .map(|&b| pos[&self.product(a, b).expect("isotropy arrows compose")])
                        .collect()
                })
                .collect(),
        }
    }
}

/// Base-point label used by [`group_to_groupoid`].
pub const GROUP_BASE_POINT: &str = "*";

/// A group as a groupoid over a single base point.
pub fn group_to_groupoid(group: &GroupTable) -> Result<FiniteGroupoid> {
    let e = group.validate()?;
    let n = group.elements.len();
    let mut seen = std::collections::HashSet::new();
    if let Some(dup) = group.elements.iter().find(|g| !seen.insert(g.as_str())) {
        return Err(Error::DuplicateIdentifier {
            path: "/elements".into(),
            id: dup.clone(),
        });
    }
    let inverse = (0..n)
        .map(|g| (0..n).find(|&h| group.table[g][h] == e).expect("validated"))
        .collect();
    let product = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .map(|(a, b)| Some(group.table[a][b]))
        .collect();
    FiniteGroupoid::from_tables(Tables {
        points: vec![GROUP_BASE_POINT.to_string()],
        arrows: group.elements.clone(),
        source: vec![0; n],
        range: vec![0; n],
        unit: vec![e],
        inverse,
        product,
    })
}

/// Label of the arrow `(y, x)` from `x` to `y` in a pair groupoid.
pub fn pair_arrow_label(y: &str, x: &str) -> String {
    format!("({y},{x})")
}

/// The pair groupoid over `points`: one arrow `(y, x)` from `x` to `y` for
/// every ordered pair, ordered by `y` then `x` so range fibers are contiguous.
pub fn pair_groupoid<S: AsRef<str>>(points: &[S]) -> Result<FiniteGroupoid> {
    if points.is_empty() {
        return Err(Error::InvalidArgument(
            "pair groupoid over an empty set".into(),
        ));
    }
    let m = points.len();
    let labels: Vec<String> = points.iter().map(|p| p.as_ref().to_string()).collect();
    let mut seen = std::collections::HashSet::new();
    if let Some(dup) = labels.iter().find(|p| !seen.insert(p.as_str())) {
        return Err(Error::DuplicateIdentifier {
            path: "/base_points".into(),
            id: dup.clone(),
        });
    }
    let idx = |y: usize, x: usize| y * m + x;
    let n = m * m;
    let mut arrows = Vec::with_capacity(n);
    let mut source = Vec::with_capacity(n);
    let mut range = Vec::with_capacity(n);
    for y in 0..m {
        for x in 0..m {
            arrows.push(pair_arrow_label(&labels[y], &labels[x]));
            source.push(x);
            range.push(y);
        }
    }
    let mut product = vec![None; n * n];
    for z in 0..m {
        for y in 0..m {
            for x in 0..m {
                product[idx(z, y) * n + idx(y, x)] = Some(idx(z, x));
            }
        }
    }
    FiniteGroupoid::from_tables(Tables {
        points: labels,
        arrows,
        source,
        range,
        unit: (0..m).map(|x| idx(x, x)).collect(),
        inverse: (0..m)
            .flat_map(|y| (0..m).map(move |x| idx(x, y)))
            .collect(),
        product,
    })
}

/// Namespaced label of a component item inside a disjoint union.
pub fn union_label(component: usize, label: &str) -> String {
    format!("{component}:{label}")
}

/// Disjoint union; labels become `"{i}:{label}"` and the canonical order is
/// the concatenation of the components' orders.
pub fn disjoint_union(components: &[&FiniteGroupoid]) -> Result<FiniteGroupoid> {
    if components.is_empty() {
        return Err(Error::InvalidArgument(
            "disjoint union of no groupoids".into(),
        ));
    }
    let total: usize = components.iter().map(|g| g.arrow_count()).sum();
    let mut t = Tables {
        points: Vec::new(),
        arrows: Vec::new(),
        source: Vec::new(),
        range: Vec::new(),
        unit: Vec::new(),
        inverse: Vec::new(),
        product: vec![None; total * total],
    };
    for (i, g) in components.iter().enumerate() {
        let (pa, pp) = (t.arrows.len(), t.points.len());
        t.points
            .extend(g.t.points.iter().map(|p| union_label(i, p)));
        t.arrows
            .extend(g.t.arrows.iter().map(|a| union_label(i, a)));
        t.source.extend(g.t.source.iter().map(|x| x + pp));
        t.range.extend(g.t.range.iter().map(|x| x + pp));
        t.unit.extend(g.t.unit.iter().map(|a| a + pa));
        t.inverse.extend(g.t.inverse.iter().map(|a| a + pa));
        let n = g.arrow_count();
        for a in 0..n {
            for b in 0..n {
                if let Some(c) = g.t.mul(a, b) {
                    t.product[(a + pa) * total + (b + pa)] = Some(c + pa);
                }
            }
        }
    }
    FiniteGroupoid::from_tables(t)
}
