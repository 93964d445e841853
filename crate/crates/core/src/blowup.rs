//! Point blow-ups: chart maps, pullback of derivations, exceptional data and
//! discrepancy bookkeeping along trees of infinitely near points on a surface.

use serde::Serialize;

use crate::derivation::Derivation;
use crate::error::{Error, Result};
use crate::field::{poly1, FieldRef};
use crate::series::Series;

/// One affine chart of the blow-up of the point `center`.
///
/// In chart `i`, after moving the center to the origin, `x_i -> y_i` and
/// `x_j -> y_i t_j` for `j != i`; the exceptional divisor is `{y_i = 0}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChartMap {
    pub center: Vec<u32>,
    pub chart_index: usize,
}

impl ChartMap {
    pub fn origin(nvars: usize, chart_index: usize) -> ChartMap {
        ChartMap { center: vec![0; nvars], chart_index }
    }

    /// Images of the (translated) coordinates under the chart map.
    pub fn forward_images(&self, field: &FieldRef) -> Vec<Series> {
        let n = self.center.len();
        let y = Series::var(field, n, self.chart_index);
        (0..n)
            .map(|j| if j == self.chart_index { y.clone() } else { &y * &Series::var(field, n, j) })
            .collect()
    }
}

/// `pi^* d = y^exponent * bracket` with `bracket` polynomial (not saturated).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pullback {
    pub exponent: i64,
    pub bracket: Derivation,
}

/// Data of the exceptional divisor of one point blow-up.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExceptionalData {
    /// `pi^* d = y^e * saturated`; the foliation discrepancy is `-e`.
    pub e: i64,
    pub saturated: Derivation,
    /// 0 when the exceptional divisor is invariant, 1 otherwise.
    pub eps: u8,
    /// Order of the derivation at the center.
    pub order: u64,
}

fn check_chart(delta: &Derivation, chart: &ChartMap) -> Result<()> {
    let n = delta.nvars();
    if chart.center.len() != n || chart.chart_index >= n {
        return Err(Error::InvalidArgument("chart does not match the number of variables".into()));
    }
    let q = delta.field().size();
    if chart.center.iter().any(|&c| c >= q) {
        return Err(Error::CoordinatesOutsideField);
    }
    if !delta.is_exact() {
        return Err(Error::InvalidArgument("pullback needs exact coefficients".into()));
    }
    Ok(())
}

/// Coefficients of `d` after moving `center` to the origin.
pub fn translate(delta: &Derivation, center: &[u32]) -> Result<Derivation> {
    let coeffs = delta.coeffs().iter().map(|c| c.translate(center)).collect::<Result<Vec<_>>>()?;
    Derivation::new(coeffs)
}

/// Pullback by the chart map, following the transformation rules
/// `d/dx_i -> d/dy_i - sum_j (t_j / y_i) d/dt_j` and `d/dx_j -> (1/y_i) d/dt_j`.
pub fn pullback(delta: &Derivation, chart: &ChartMap) -> Result<Pullback> {
    check_chart(delta, chart)?;
    let field = delta.field().clone();
    let d = translate(delta, &chart.center)?;
    let order = d.order()?;
    let i = chart.chart_index;
    let n = d.nvars();
    let images = chart.forward_images(&field);
    let pulled = d.coeffs().iter().map(|c| c.substitute(&images)).collect::<Result<Vec<_>>>()?;
    let y = Series::var(&field, n, i);
    let dd = order as u32;
    let mut bracket = Vec::with_capacity(n);
    for j in 0..n {
        let raw = if j == i {
            &y * &pulled[i]
        } else {
            &pulled[j] - &(&Series::var(&field, n, j) * &pulled[i])
        };
        let c = raw.div_var_power(i, dd).map_err(|_| {
            Error::InternalConsistency("pulled-back coefficient not divisible by y^d".into())
        })?;
        bracket.push(c);
    }
    Ok(Pullback { exponent: order as i64 - 1, bracket: Derivation::new(bracket)? })
}

/// Exceptional multiplicity, y-saturated pullback and invariance flag.
pub fn exceptional_data(delta: &Derivation, chart: &ChartMap) -> Result<ExceptionalData> {
    let pb = pullback(delta, chart)?;
    let i = chart.chart_index;
    let m = pb
        .bracket
        .coeffs()
        .iter()
        .filter_map(|c| c.var_valuation(i))
        .min()
        .ok_or(Error::ZeroDerivation)?;
    let coeffs = pb
        .bracket
        .coeffs()
        .iter()
        .map(|c| c.div_var_power(i, m))
        .collect::<Result<Vec<_>>>()?;
    let saturated = Derivation::new(coeffs)?;
    let invariant = saturated.coeff(i).var_valuation(i).is_none_or(|v| v >= 1);
    let order = (pb.exponent + 1) as u64;
    Ok(ExceptionalData { e: pb.exponent + m as i64, saturated, eps: if invariant { 0 } else { 1 }, order })
}

/// A point on an exceptional curve, in the curve's chart-0 coordinate `t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Center {
    /// The original point (only for the first blow-up).
    Origin,
    /// The point `t = c` in chart 0 of the parent blow-up.
    T(u32),
    /// The point at infinity, the origin of chart 1.
    Inf,
}

impl Center {
    pub fn render(&self, field: &FieldRef) -> String {
        match self {
            Center::Origin => "origin".into(),
            Center::T(c) => format!("t={}", field.render(*c).replace(' ', "")),
            Center::Inf => "t=inf".into(),
        }
    }
}

/// Zeros of a saturated derivation on an exceptional curve.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CandidateCenters {
    /// Rational points, in encoding order; `None` stands for the point at infinity.
    pub points: Vec<Option<u32>>,
    pub irrational_centers_possible: bool,
}

/// Rational zeros on `{x_exc = 0}` of a surface derivation, as values of the other coordinate.
pub fn candidate_centers(delta: &Derivation, exc: usize) -> Result<CandidateCenters> {
    if delta.nvars() != 2 || exc > 1 {
        return Err(Error::InvalidArgument("candidate centers are computed on surfaces".into()));
    }
    let f = delta.field().clone();
    let other = 1 - exc;
    let restricted = delta
        .coeffs()
        .iter()
        .map(|c| c.restrict_zero(exc).to_univariate(other))
        .collect::<Result<Vec<_>>>()?;
    let g = poly1::gcd(&f, &restricted[0], &restricted[1]);
    if g.is_empty() {
        return Err(Error::InternalConsistency(
            "saturated derivation vanishes along the exceptional curve".into(),
        ));
    }
    let roots = poly1::roots(&f, &g);
    let sqf_degree = poly1::degree(&poly1::squarefree_part(&f, &g)).unwrap_or(0);
    Ok(CandidateCenters {
        irrational_centers_possible: sqf_degree > roots.len(),
        points: roots.into_iter().map(Some).collect(),
    })
}

/// Local picture in one chart: saturated derivation, tracked exceptional curves
/// through the chart with their local equations, and the images of the original coordinates.
#[derive(Clone, Debug)]
pub struct ChartState {
    pub delta: Derivation,
    pub divisors: Vec<(usize, Series)>,
    pub root_images: Vec<Series>,
}

impl ChartState {
    fn translated(&self, shift: &[u32]) -> Result<ChartState> {
        Ok(ChartState {
            delta: translate(&self.delta, shift)?,
            divisors: self
                .divisors
                .iter()
                .map(|(id, h)| Ok((*id, h.translate(shift)?)))
                .collect::<Result<Vec<_>>>()?,
            root_images: self.root_images.iter().map(|g| g.translate(shift)).collect::<Result<Vec<_>>>()?,
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExceptionalDivisorNode {
    pub id: usize,
    /// 0 denotes the original point.
    pub parent: usize,
    pub depth: u32,
    #[serde(skip)]
    pub center: Center,
    pub center_label: String,
    pub a_x: i64,
    pub a_f: i64,
    pub eps: u8,
    /// 1 if the divisor is invariant, p otherwise.
    pub invariance_factor: u32,
    /// Exponent of the exceptional coordinate in the pullback of the center's generator.
    pub e: i64,
    /// Order of the generator at the blown-up point.
    pub center_order: u64,
    /// Vanishing orders of the original coordinates along the divisor.
    pub valuation: Vec<u64>,
    #[serde(skip)]
    charts: [ChartState; 2],
}

impl ExceptionalDivisorNode {
    pub fn chart(&self, i: usize) -> &ChartState {
        &self.charts[i]
    }

    /// `node <id> parent=<id> aX=<int> aF=<int> eps=<0|1> center=<label>`.
    pub fn record(&self) -> String {
        format!(
            "node {} parent={} aX={} aF={} eps={} center={}",
            self.id, self.parent, self.a_x, self.a_f, self.eps, self.center_label
        )
    }
}

/// Tree of point blow-ups over the origin of a surface foliated by a derivation.
#[derive(Clone, Debug)]
pub struct BlowupTree {
    root: Derivation,
    content: Series,
    nodes: Vec<ExceptionalDivisorNode>,
    irrational_centers_possible: bool,
}

impl BlowupTree {
    /// Starts a tree at the origin; the derivation is saturated first.
    pub fn new(delta: &Derivation) -> Result<BlowupTree> {
        if delta.nvars() != 2 {
            return Err(Error::InvalidArgument("blow-up trees are built over surfaces".into()));
        }
        let (root, content) = delta.saturate()?;
        Ok(BlowupTree { root, content, nodes: Vec::new(), irrational_centers_possible: false })
    }

    pub fn root(&self) -> &Derivation {
        &self.root
    }

    /// Common factor removed from the input derivation.
    pub fn content(&self) -> &Series {
        &self.content
    }

    pub fn nodes(&self) -> &[ExceptionalDivisorNode] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> Option<&ExceptionalDivisorNode> {
        id.checked_sub(1).and_then(|i| self.nodes.get(i))
    }

    pub fn irrational_centers_possible(&self) -> bool {
        self.irrational_centers_possible
    }

    pub fn children(&self, id: usize) -> impl Iterator<Item = &ExceptionalDivisorNode> {
        self.nodes.iter().filter(move |n| n.parent == id)
    }

    fn field(&self) -> &FieldRef {
        self.root.field()
    }

    fn root_state(&self) -> ChartState {
        let f = self.field();
        ChartState {
            delta: self.root.clone(),
            divisors: Vec::new(),
            root_images: vec![Series::var(f, 2, 0), Series::var(f, 2, 1)],
        }
    }

    /// Local state with `center` moved to the origin.
    fn state_at(&self, parent: usize, center: Center) -> Result<ChartState> {
        let q = self.field().size();
        match (parent, center) {
            (0, Center::Origin) => Ok(self.root_state()),
            (0, _) | (_, Center::Origin) => Err(Error::CenterNotOnExceptional),
            (id, c) => {
                let node = self.node(id).ok_or_else(|| {
                    Error::InvalidArgument(format!("no exceptional divisor with id {id}"))
                })?;
                match c {
                    Center::T(v) if v >= q => Err(Error::CoordinatesOutsideField),
                    Center::T(v) => node.charts[0].translated(&[0, v]),
                    _ => Ok(node.charts[1].clone()),
                }
            }
        }
    }

    /// Blows up `center` on the divisor `parent` (0 with `Origin` for the original point).
    pub fn extend(&mut self, parent: usize, center: Center) -> Result<usize> {
        if self.nodes.iter().any(|n| n.parent == parent && n.center == center) {
            return Err(Error::InvalidArgument("center already blown up".into()));
        }
        let state = self.state_at(parent, center)?;
        let f = self.field().clone();
        let id = self.nodes.len() + 1;
        let depth = if parent == 0 { 1 } else { self.node(parent).unwrap().depth + 1 };
        let mut datas = Vec::with_capacity(2);
        let mut charts = Vec::with_capacity(2);
        for c in 0..2 {
            let map = ChartMap::origin(2, c);
            let data = exceptional_data(&state.delta, &map)?;
            let images = map.forward_images(&f);
            let mut divisors = Vec::new();
            for (did, h) in &state.divisors {
                let pulled = h.substitute(&images)?;
                let mult = h.order().unwrap_or(0) as u32;
                let strict = pulled.div_var_power(c, mult)?;
                if !strict.is_constant() {
                    divisors.push((*did, strict));
                }
            }
            divisors.push((id, Series::var(&f, 2, c)));
            let root_images =
                state.root_images.iter().map(|g| g.substitute(&images)).collect::<Result<Vec<_>>>()?;
            charts.push(ChartState { delta: data.saturated.clone(), divisors, root_images });
            datas.push(data);
        }
        if datas[0].e != datas[1].e || datas[0].eps != datas[1].eps {
            return Err(Error::InternalConsistency(format!(
                "chart dependence at node {id}: (e, eps) = ({}, {}) vs ({}, {})",
                datas[0].e, datas[0].eps, datas[1].e, datas[1].eps
            )));
        }
        let valuation: Vec<u64> = charts[0]
            .root_images
            .iter()
            .map(|g| g.var_valuation(0).unwrap_or(0) as u64)
            .collect();
        let valuation1: Vec<u64> = charts[1]
            .root_images
            .iter()
            .map(|g| g.var_valuation(1).unwrap_or(0) as u64)
            .collect();
        if valuation != valuation1 {
            return Err(Error::InternalConsistency(format!("valuation differs between charts at node {id}")));
        }
        let mut a_x = 1i64;
        let mut a_f = -datas[0].e;
        for (did, h) in &state.divisors {
            let mult = h.order().unwrap_or(0) as i64;
            let old = self.node(*did).expect("tracked divisor exists");
            a_x += mult * old.a_x;
            a_f += mult * old.a_f;
        }
        let eps = datas[0].eps;
        let [c0, c1]: [ChartState; 2] = charts.try_into().expect("two charts");
        self.nodes.push(ExceptionalDivisorNode {
            id,
            parent,
            depth,
            center,
            center_label: center.render(&f),
            a_x,
            a_f,
            eps,
            invariance_factor: if eps == 0 { 1 } else { f.p() },
            e: datas[0].e,
            center_order: datas[0].order,
            valuation,
            charts: [c0, c1],
        });
        Ok(id)
    }

    /// Functional variant of `extend`.
    pub fn extend_tree(&self, parent: usize, center: Center) -> Result<(BlowupTree, usize)> {
        let mut t = self.clone();
        let id = t.extend(parent, center)?;
        Ok((t, id))
    }

    /// Zeros of the saturated pullback on the divisor `id`, chart-0 points first, then infinity.
    pub fn candidate_centers(&self, id: usize) -> Result<(Vec<Center>, bool)> {
        let node = self
            .node(id)
            .ok_or_else(|| Error::InvalidArgument(format!("no exceptional divisor with id {id}")))?;
        let affine = candidate_centers(&node.charts[0].delta, 0)?;
        let mut out: Vec<Center> = affine.points.iter().map(|p| Center::T(p.unwrap())).collect();
        let at_inf = &node.charts[1].delta;
        if at_inf.coeffs().iter().all(|c| c.constant_term() == 0) {
            out.push(Center::Inf);
        }
        Ok((out, affine.irrational_centers_possible))
    }

    /// Breadth-first exploration to `depth`, blowing up every rational zero.
    ///
    /// `stop` is consulted after each completed level; returning true ends the search.
    pub fn explore_until<F>(&mut self, depth: u32, mut stop: F) -> Result<()>
    where
        F: FnMut(&[ExceptionalDivisorNode]) -> bool,
    {
        if depth == 0 {
            return Ok(());
        }
        if self.nodes.is_empty() {
            self.extend(0, Center::Origin)?;
        }
        let mut frontier: Vec<usize> = self.nodes.iter().map(|n| n.id).collect();
        if stop(&self.nodes) {
            return Ok(());
        }
        for _ in 1..depth {
            let mut next = Vec::new();
            for id in frontier {
                let (centers, irrational) = self.candidate_centers(id)?;
                self.irrational_centers_possible |= irrational;
                for c in centers {
                    next.push(self.extend(id, c)?);
                }
            }
            if next.is_empty() {
                break;
            }
            let level: Vec<ExceptionalDivisorNode> =
                next.iter().map(|&i| self.node(i).unwrap().clone()).collect();
            if stop(&level) {
                break;
            }
            frontier = next;
        }
        Ok(())
    }

    /// Full exploration to `depth`.
    pub fn explore(delta: &Derivation, depth: u32) -> Result<BlowupTree> {
        let mut t = BlowupTree::new(delta)?;
        t.explore_until(depth, |_| false)?;
        Ok(t)
    }

    pub fn records(&self) -> Vec<String> {
        self.nodes.iter().map(ExceptionalDivisorNode::record).collect()
    }
}

#[cfg(test)]
mod tests;
