//! Sampled contract menus and their CSV / JSON forms.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cost::CostModel;
use crate::distributions::OrderingRegime;
use crate::error::{Error, Result};
use crate::quadrature::Rule;
use crate::scenario::{Group, ScenarioConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MenuRegime {
    FullSeparation,
    FullPooling,
    SemiPooling,
}

impl std::fmt::Display for MenuRegime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MenuRegime::FullSeparation => "FullSeparation",
            MenuRegime::FullPooling => "FullPooling",
            MenuRegime::SemiPooling => "SemiPooling",
        })
    }
}

/// Which part of the menu a grid node falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    #[serde(rename = "SEP")]
    Separating,
    #[serde(rename = "POOL")]
    Pooling,
    #[serde(rename = "OUT")]
    NotHired,
}

/// Quantity assignment q^j(θ).
pub trait QuantitySchedule {
    fn quantity(&self, group: Group, theta: f64) -> f64;
}

/// A menu with wages, as seen by an agent choosing a contract.
pub trait MenuView: QuantitySchedule {
    fn wage(&self, group: Group, theta: f64) -> f64;
    /// Utility promised to the most costly trait agent.
    fn transfer(&self) -> f64;
}

/// Linear interpolation of node values; constant outside the grid.
pub fn interpolate(grid: &[f64], values: &[f64], theta: f64) -> f64 {
    let n = grid.len();
    if theta <= grid[0] {
        return values[0];
    }
    if theta >= grid[n - 1] {
        return values[n - 1];
    }
    let k = grid.partition_point(|&x| x <= theta) - 1;
    let t = (theta - grid[k]) / (grid[k + 1] - grid[k]);
    values[k] + t * (values[k + 1] - values[k])
}

/// Quantities known only at grid nodes, linear in between.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSchedule {
    pub grid: Vec<f64>,
    pub q_trait: Vec<f64>,
    pub q_nontrait: Vec<f64>,
}

impl SampledSchedule {
    pub fn q(&self, group: Group) -> &[f64] {
        match group {
            Group::Trait => &self.q_trait,
            Group::NonTrait => &self.q_nontrait,
        }
    }
}

impl QuantitySchedule for SampledSchedule {
    fn quantity(&self, group: Group, theta: f64) -> f64 {
        interpolate(&self.grid, self.q(group), theta)
    }
}

/// Information rents R^j(θ) = ∫_θ^1 C_θ(q^j(x), x) dx at grid nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct RentProfile {
    pub grid: Vec<f64>,
    pub trait_rent: Vec<f64>,
    pub nontrait_rent: Vec<f64>,
}

impl RentProfile {
    pub fn compute(schedule: &dyn QuantitySchedule, grid: &[f64], cost: &dyn CostModel, rule: &Rule) -> Self {
        let rents = |group: Group| {
            let n = grid.len();
            let mut r = vec![0.0; n];
            for i in (0..n - 1).rev() {
                let piece = rule.integrate(grid[i], grid[i + 1], |x| cost.c_theta(schedule.quantity(group, x), x));
                r[i] = r[i + 1] + piece;
            }
            r
        };
        RentProfile {
            grid: grid.to_vec(),
            trait_rent: rents(Group::Trait),
            nontrait_rent: rents(Group::NonTrait),
        }
    }

    pub fn rent(&self, group: Group) -> &[f64] {
        match group {
            Group::Trait => &self.trait_rent,
            Group::NonTrait => &self.nontrait_rent,
        }
    }

    /// I(θ) = R^N(θ) − R^T(θ).
    pub fn difference(&self) -> Vec<f64> {
        self.nontrait_rent.iter().zip(&self.trait_rent).map(|(n, t)| n - t).collect()
    }

    /// Largest I(θ) floored at zero, with the node attaining it.
    pub fn required_transfer(&self) -> (f64, f64) {
        let mut best = (0.0, 1.0);
        for (i, d) in self.difference().into_iter().enumerate() {
            if d > best.0 {
                best = (d, self.grid[i]);
            }
        }
        best
    }
}

/// A menu sampled on a θ grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ContractMenu {
    pub theta: Vec<f64>,
    pub q_trait: Vec<f64>,
    pub q_nontrait: Vec<f64>,
    pub w_trait: Vec<f64>,
    pub w_nontrait: Vec<f64>,
    pub region: Vec<Region>,
    pub regime: Option<MenuRegime>,
    pub trait_cutoff: Option<f64>,
    pub nontrait_cutoff: Option<f64>,
    pub pooled_cutoff: Option<f64>,
    pub pooling_cutoff: Option<f64>,
    pub transfer: f64,
}

impl ContractMenu {
    /// Builds wages by revenue equivalence from node quantities, with
    /// linear interpolation between nodes.
    pub fn from_quantities(
        grid: Vec<f64>,
        q_trait: Vec<f64>,
        q_nontrait: Vec<f64>,
        transfer: f64,
        cost: &dyn CostModel,
        rule: &Rule,
    ) -> Self {
        let schedule = SampledSchedule {
            grid,
            q_trait,
            q_nontrait,
        };
        let rents = RentProfile::compute(&schedule, &schedule.grid, cost, rule);
        let wages = |group: Group| -> Vec<f64> {
            let extra = if group == Group::Trait { transfer } else { 0.0 };
            schedule
                .grid
                .iter()
                .zip(schedule.q(group))
                .zip(rents.rent(group))
                .map(|((&x, &q), &r)| extra + cost.cost(q, x) + r)
                .collect()
        };
        let w_trait = wages(Group::Trait);
        let w_nontrait = wages(Group::NonTrait);
        let region = classify_regions(&schedule.q_trait, &schedule.q_nontrait);
        ContractMenu {
            theta: schedule.grid,
            q_trait: schedule.q_trait,
            q_nontrait: schedule.q_nontrait,
            w_trait,
            w_nontrait,
            region,
            regime: None,
            trait_cutoff: None,
            nontrait_cutoff: None,
            pooled_cutoff: None,
            pooling_cutoff: None,
            transfer,
        }
    }

    /// Every agent turned away.
    pub fn null(grid: Vec<f64>) -> Self {
        let n = grid.len();
        ContractMenu {
            theta: grid,
            q_trait: vec![0.0; n],
            q_nontrait: vec![0.0; n],
            w_trait: vec![0.0; n],
            w_nontrait: vec![0.0; n],
            region: vec![Region::NotHired; n],
            regime: None,
            trait_cutoff: None,
            nontrait_cutoff: None,
            pooled_cutoff: None,
            pooling_cutoff: None,
            transfer: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    pub fn q(&self, group: Group) -> &[f64] {
        match group {
            Group::Trait => &self.q_trait,
            Group::NonTrait => &self.q_nontrait,
        }
    }

    pub fn w(&self, group: Group) -> &[f64] {
        match group {
            Group::Trait => &self.w_trait,
            Group::NonTrait => &self.w_nontrait,
        }
    }

    pub fn schedule(&self) -> SampledSchedule {
        SampledSchedule {
            grid: self.theta.clone(),
            q_trait: self.q_trait.clone(),
            q_nontrait: self.q_nontrait.clone(),
        }
    }

    /// Grid and column shape checks applied to menus read from disk.
    pub fn validate_schema(&self) -> Result<()> {
        let n = self.theta.len();
        if n < 2 {
            return Err(Error::Schema("a menu needs at least two grid points".into()));
        }
        let columns = [&self.q_trait, &self.q_nontrait, &self.w_trait, &self.w_nontrait];
        if columns.iter().any(|c| c.len() != n) || self.region.len() != n {
            return Err(Error::Schema("columns differ in length".into()));
        }
        if self.theta[0].abs() > 1e-12 || (self.theta[n - 1] - 1.0).abs() > 1e-12 {
            return Err(Error::Schema("theta must run from 0 to 1".into()));
        }
        if let Some(i) = (1..n).find(|&i| self.theta[i] <= self.theta[i - 1]) {
            return Err(Error::Schema(format!("theta not strictly increasing at row {i}")));
        }
        for (name, col) in ["theta", "qT", "qN", "wT", "wN"].iter().zip([&self.theta, columns[0], columns[1], columns[2], columns[3]]) {
            if let Some(i) = col.iter().position(|v| !v.is_finite()) {
                return Err(Error::Schema(format!("non-finite {name} at row {i}")));
            }
        }
        if let Some(i) = self.q_trait.iter().chain(&self.q_nontrait).position(|&v| v < 0.0) {
            return Err(Error::Schema(format!("negative quantity at entry {i}")));
        }
        if !self.transfer.is_finite() {
            return Err(Error::Schema("transfer must be finite".into()));
        }
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["theta", "qT", "qN", "wT", "wN", "region"])?;
        for i in 0..self.len() {
            let region = match self.region[i] {
                Region::Separating => "SEP",
                Region::Pooling => "POOL",
                Region::NotHired => "OUT",
            };
            w.write_record([
                fmt_sig(self.theta[i]),
                fmt_sig(self.q_trait[i]),
                fmt_sig(self.q_nontrait[i]),
                fmt_sig(self.w_trait[i]),
                fmt_sig(self.w_nontrait[i]),
                region.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads the CSV form. The transfer is not part of the table and is
    /// recovered as U^T(1) = wT(1) − C(qT(1), 1).
    pub fn read_csv<R: Read>(input: R, cost: &dyn CostModel) -> Result<Self> {
        #[derive(Deserialize)]
        struct Row {
            theta: f64,
            #[serde(rename = "qT")]
            q_trait: f64,
            #[serde(rename = "qN")]
            q_nontrait: f64,
            #[serde(rename = "wT")]
            w_trait: f64,
            #[serde(rename = "wN")]
            w_nontrait: f64,
            region: Region,
        }
        let mut menu = ContractMenu::null(Vec::new());
        let mut reader = csv::Reader::from_reader(input);
        for row in reader.deserialize() {
            let row: Row = row.map_err(|e| Error::Schema(e.to_string()))?;
            menu.theta.push(row.theta);
            menu.q_trait.push(row.q_trait);
            menu.q_nontrait.push(row.q_nontrait);
            menu.w_trait.push(row.w_trait);
            menu.w_nontrait.push(row.w_nontrait);
            menu.region.push(row.region);
        }
        if let (Some(&w), Some(&q)) = (menu.w_trait.last(), menu.q_trait.last()) {
            menu.transfer = w - cost.cost(q, 1.0);
        }
        menu.validate_schema()?;
        Ok(menu)
    }

    pub fn to_document(&self, ordering: Option<OrderingRegime>, objective: Option<f64>, scenario: Option<ScenarioConfig>) -> MenuDocument {
        let round_all = |v: &[f64]| v.iter().map(|&x| round_sig(x)).collect::<Vec<_>>();
        MenuDocument {
            regime: self.regime,
            ordering,
            trait_cutoff: self.trait_cutoff.map(round_sig),
            nontrait_cutoff: self.nontrait_cutoff.map(round_sig),
            pooled_cutoff: self.pooled_cutoff.map(round_sig),
            pooling_cutoff: self.pooling_cutoff.map(round_sig),
            transfer: round_sig(self.transfer),
            objective: objective.map(round_sig),
            scenario,
            menu: MenuColumns {
                theta: round_all(&self.theta),
                q_trait: round_all(&self.q_trait),
                q_nontrait: round_all(&self.q_nontrait),
                w_trait: round_all(&self.w_trait),
                w_nontrait: round_all(&self.w_nontrait),
                region: self.region.clone(),
            },
        }
    }

    pub fn from_document(doc: MenuDocument) -> Result<Self> {
        let m = doc.menu;
        let menu = ContractMenu {
            theta: m.theta,
            q_trait: m.q_trait,
            q_nontrait: m.q_nontrait,
            w_trait: m.w_trait,
            w_nontrait: m.w_nontrait,
            region: m.region,
            regime: doc.regime,
            trait_cutoff: doc.trait_cutoff,
            nontrait_cutoff: doc.nontrait_cutoff,
            pooled_cutoff: doc.pooled_cutoff,
            pooling_cutoff: doc.pooling_cutoff,
            transfer: doc.transfer,
        };
        menu.validate_schema()?;
        Ok(menu)
    }

    /// Loads a menu file, choosing the format from the extension.
    pub fn load(path: &Path, cost: &dyn CostModel) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
            let doc: MenuDocument = serde_json::from_reader(std::io::BufReader::new(file))
                .map_err(|e| Error::Schema(e.to_string()))?;
            Self::from_document(doc)
        } else {
            Self::read_csv(std::io::BufReader::new(file), cost)
        }
    }
}

fn classify_regions(q_trait: &[f64], q_nontrait: &[f64]) -> Vec<Region> {
    q_trait
        .iter()
        .zip(q_nontrait)
        .map(|(&t, &n)| {
            if t <= 0.0 && n <= 0.0 {
                Region::NotHired
            } else if t == n {
                Region::Pooling
            } else {
                Region::Separating
            }
        })
        .collect()
}

impl QuantitySchedule for ContractMenu {
    fn quantity(&self, group: Group, theta: f64) -> f64 {
        interpolate(&self.theta, self.q(group), theta)
    }
}

impl MenuView for ContractMenu {
    fn wage(&self, group: Group, theta: f64) -> f64 {
        interpolate(&self.theta, self.w(group), theta)
    }

    fn transfer(&self) -> f64 {
        self.transfer
    }
}

/// JSON form of a solved menu.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MenuDocument {
    pub regime: Option<MenuRegime>,
    pub ordering: Option<OrderingRegime>,
    pub trait_cutoff: Option<f64>,
    pub nontrait_cutoff: Option<f64>,
    pub pooled_cutoff: Option<f64>,
    pub pooling_cutoff: Option<f64>,
    pub transfer: f64,
    pub objective: Option<f64>,
    pub scenario: Option<ScenarioConfig>,
    pub menu: MenuColumns,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MenuColumns {
    pub theta: Vec<f64>,
    #[serde(rename = "qT")]
    pub q_trait: Vec<f64>,
    #[serde(rename = "qN")]
    pub q_nontrait: Vec<f64>,
    #[serde(rename = "wT")]
    pub w_trait: Vec<f64>,
    #[serde(rename = "wN")]
    pub w_nontrait: Vec<f64>,
    pub region: Vec<Region>,
}

/// Rounds to nine significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.8e}").parse().unwrap_or(x)
}

/// Shortest decimal text of `x` rounded to nine significant digits.
pub fn fmt_sig(x: f64) -> String {
    let r = round_sig(x);
    if r == 0.0 {
        "0".to_string()
    } else if (1e-6..1e15).contains(&r.abs()) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

/// Utility of a type-θ agent taking the group `choice` contract meant for θ′.
/// `None` is the outside option.
pub fn agent_utility(menu: &dyn MenuView, cost: &dyn CostModel, theta: f64, choice: Option<(Group, f64)>) -> f64 {
    match choice {
        None => 0.0,
        Some((group, reported)) => menu.wage(group, reported) - cost.cost(menu.quantity(group, reported), theta),
    }
}
