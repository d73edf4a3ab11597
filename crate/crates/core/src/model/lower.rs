use super::{Constraint, GuardedPta, ModelError, ParamValuation, Relation};

/// `clock ⋈ bound` over clock indices, after parameter substitution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Atom {
    pub clock: usize,
    pub rel: Relation,
    pub bound: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoweredEdge {
    pub source: usize,
    pub target: usize,
    pub guard: Vec<Atom>,
    pub locguard: Option<usize>,
    pub resets: Vec<usize>,
}

/// Index-based form of a valuated gPTA, shared by the symbolic engines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoweredTa {
    pub locations: Vec<String>,
    pub initial: usize,
    pub clocks: Vec<String>,
    pub invariants: Vec<Vec<Atom>>,
    pub edges: Vec<LoweredEdge>,
    /// Largest absolute constant of any guard or invariant (0 if none).
    pub max_constant: i64,
}

impl LoweredTa {
    pub fn new(model: &GuardedPta, v: &ParamValuation) -> Result<Self, ModelError> {
        model.ensure_valid()?;
        v.check_domain(&model.params)?;
        let loc = |name: &str| model.location_index(name).ok_or_else(|| ModelError::UnknownLocation(name.to_string()));
        let clock = |name: &str| model.clocks.iter().position(|c| c == name).ok_or_else(|| ModelError::MissingClock(name.to_string()));
        let mut max_constant = 0i64;
        let mut atoms = |c: &Constraint| -> Result<Vec<Atom>, ModelError> {
            c.conjuncts
                .iter()
                .map(|i| {
                    let bound = i.rhs.evaluate(v)?;
                    max_constant = max_constant.max(bound.abs());
                    Ok(Atom { clock: clock(&i.clock)?, rel: i.rel, bound })
                })
                .collect()
        };
        let invariants = model.locations.iter().map(|l| atoms(&l.invariant)).collect::<Result<Vec<_>, _>>()?;
        let mut edges = Vec::with_capacity(model.edges.len());
        for e in &model.edges {
            edges.push(LoweredEdge {
                source: loc(&e.source)?,
                target: loc(&e.target)?,
                guard: atoms(&e.guard)?,
                locguard: e.locguard.as_deref().map(loc).transpose()?,
                resets: e.resets.iter().map(|r| clock(r)).collect::<Result<_, _>>()?,
            });
        }
        Ok(LoweredTa {
            locations: model.locations.iter().map(|l| l.name.clone()).collect(),
            initial: loc(&model.initial)?,
            clocks: model.clocks.clone(),
            invariants,
            edges,
            max_constant,
        })
    }

    pub fn location_index(&self, name: &str) -> Option<usize> {
        self.locations.iter().position(|l| l == name)
    }

    pub fn clock_count(&self) -> usize {
        self.clocks.len()
    }

    /// Edge indices leaving `loc`, in declaration order.
    pub fn outgoing(&self, loc: usize) -> impl Iterator<Item = (usize, &LoweredEdge)> {
        self.edges.iter().enumerate().filter(move |(_, e)| e.source == loc)
    }
}
