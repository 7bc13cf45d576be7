//! JSON interchange for models, domains, traces and observed transitions.
//! Output is canonical: object keys are sorted, collections keep their
//! construction order, and equal inputs serialise to identical bytes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::domain::{Domain, DomainState};
use crate::error::{Error, Result};
use crate::event::{Event, EventModel, PostOp};
use crate::formula::Formula;
use crate::model::EpistemicModel;
use crate::sig::{Mask, Obs, Signature};
use crate::trace::{ObservationTrace, ObservedTransition};

fn mask_to_names(sig: &Signature, m: Mask) -> Vec<String> {
    sig.props()
        .iter()
        .enumerate()
        .filter(|(i, _)| m & (1 << i) != 0)
        .map(|(_, name)| name.clone())
        .collect()
}

fn names_to_mask(sig: &Signature, names: &[String]) -> Result<Mask> {
    let mut m = 0;
    for name in names {
        let i = sig
            .index_of(name)
            .ok_or_else(|| Error::UnknownProposition(name.clone()))?;
        m |= 1 << i;
    }
    Ok(m)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ObsDto {
    pos: Vec<String>,
    neg: Vec<String>,
}

impl ObsDto {
    fn from_obs(sig: &Signature, o: Obs) -> ObsDto {
        ObsDto {
            pos: mask_to_names(sig, o.pos()),
            neg: mask_to_names(sig, o.neg()),
        }
    }

    fn to_obs(&self, sig: &Signature) -> Result<Obs> {
        Obs::new(names_to_mask(sig, &self.pos)?, names_to_mask(sig, &self.neg)?)
    }
}

/// A valuation is written as the array of true propositions; the compact
/// literal form ("p~q r") is accepted on input.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ValDto {
    Props(Vec<String>),
    Literal(String),
}

impl ValDto {
    fn to_mask(&self, sig: &Signature) -> Result<Mask> {
        match self {
            ValDto::Props(names) => names_to_mask(sig, names),
            ValDto::Literal(text) => {
                let m = sig.parse_literals(text)?;
                Ok(m)
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EventDto {
    id: String,
    pre: String,
    post: BTreeMap<String, String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EventModelDto {
    events: Vec<EventDto>,
    partition: Vec<Vec<String>>,
}

pub fn event_model_to_json(m: &EventModel) -> Value {
    let sig = m.sig();
    let events = m
        .events()
        .iter()
        .map(|e| EventDto {
            id: e.id.clone(),
            pre: e.pre.to_string(),
            post: sig
                .props()
                .iter()
                .enumerate()
                .map(|(i, p)| {
                    let op = match e.post[i] {
                        PostOp::True => "T",
                        PostOp::False => "F",
                        PostOp::Keep => "keep",
                    };
                    (p.clone(), op.to_string())
                })
                .collect(),
        })
        .collect();
    let partition = m
        .components()
        .iter()
        .map(|cell| cell.iter().map(|&e| m.events()[e].id.clone()).collect())
        .collect();
    serde_json::to_value(EventModelDto { events, partition }).expect("event model serialises")
}

pub fn event_model_from_json(sig: &Signature, v: &Value) -> Result<EventModel> {
    let dto: EventModelDto = serde_json::from_value(v.clone())?;
    let mut events = Vec::with_capacity(dto.events.len());
    for e in dto.events {
        let mut post = vec![PostOp::Keep; sig.len()];
        for (name, op) in &e.post {
            let i = sig
                .index_of(name)
                .ok_or_else(|| Error::UnknownProposition(name.clone()))?;
            post[i] = match op.as_str() {
                "T" => PostOp::True,
                "F" => PostOp::False,
                "keep" => PostOp::Keep,
                other => {
                    return Err(Error::Json(format!(
                        "postcondition effect must be \"T\", \"F\" or \"keep\", got {other:?}"
                    )))
                }
            };
        }
        events.push(Event {
            id: e.id,
            pre: Formula::parse(&e.pre)?,
            post,
        });
    }
    EventModel::new(sig.clone(), events, dto.partition)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WorldDto {
    id: String,
    val: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EpistemicModelDto {
    /// Explicit signature; without it the propositions are inferred from the
    /// world valuations, which cannot express a proposition false everywhere.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    props: Option<Vec<String>>,
    worlds: Vec<WorldDto>,
    partition: Vec<Vec<String>>,
}

pub fn epistemic_model_to_json(m: &EpistemicModel) -> Value {
    let sig = m.sig();
    let worlds = m
        .worlds()
        .iter()
        .map(|w| WorldDto {
            id: w.id.clone(),
            val: mask_to_names(sig, w.val),
        })
        .collect();
    let partition = m
        .components()
        .iter()
        .map(|cell| cell.iter().map(|&w| m.worlds()[w].id.clone()).collect())
        .collect();
    serde_json::to_value(EpistemicModelDto {
        props: Some(sig.props().to_vec()),
        worlds,
        partition,
    })
    .expect("model serialises")
}

/// Reads an epistemic model. The signature is taken from the caller when
/// supplied (a `props` field must then agree), else from the document's
/// `props` field, else inferred as the union of the world valuations.
pub fn epistemic_model_from_json(sig: Option<&Signature>, v: &Value) -> Result<EpistemicModel> {
    let dto: EpistemicModelDto = serde_json::from_value(v.clone())?;
    let declared = dto
        .props
        .as_ref()
        .map(|names| Signature::new(names.iter().map(|p| p.as_str())))
        .transpose()?;
    let sig = match (sig, declared) {
        (Some(s), Some(d)) if *s != d => return Err(Error::SignatureMismatch),
        (Some(s), _) => s.clone(),
        (None, Some(d)) => d,
        (None, None) => {
            let mut names: Vec<String> = dto
                .worlds
                .iter()
                .flat_map(|w| w.val.iter().cloned())
                .collect();
            names.sort();
            names.dedup();
            Signature::new(names)?
        }
    };
    let worlds = dto
        .worlds
        .iter()
        .map(|w| Ok((w.id.clone(), names_to_mask(&sig, &w.val)?)))
        .collect::<Result<Vec<_>>>()?;
    EpistemicModel::new(sig, worlds, dto.partition)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateDto {
    id: String,
    kind: String,
    val: Value,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DomainDto {
    props: Vec<String>,
    actions: Vec<String>,
    states: Vec<StateDto>,
    initial: String,
    transitions: Vec<(String, String, String)>,
    obs: BTreeMap<String, ObsDto>,
    deterministic: bool,
}

fn val_json(sig: &Signature, m: Mask) -> Value {
    serde_json::to_value(mask_to_names(sig, m)).expect("names serialise")
}

fn payload_to_json(sig: &Signature, s: &DomainState) -> (String, Value) {
    match s {
        DomainState::Val(m) => ("val".to_string(), val_json(sig, *m)),
        DomainState::CompSet(vs) => (
            "compset".to_string(),
            Value::Array(vs.iter().map(|&m| val_json(sig, m)).collect()),
        ),
        DomainState::Tuple(vs) => (
            "tuple".to_string(),
            Value::Array(vs.iter().map(|&m| val_json(sig, m)).collect()),
        ),
        DomainState::Model(m) => ("model".to_string(), epistemic_model_to_json(m)),
    }
}

fn val_list(sig: &Signature, v: &Value) -> Result<Vec<Mask>> {
    let items: Vec<ValDto> = serde_json::from_value(v.clone())?;
    items.iter().map(|d| d.to_mask(sig)).collect()
}

fn payload_from_json(sig: &Signature, kind: &str, v: &Value) -> Result<DomainState> {
    match kind {
        "val" => {
            let dto: ValDto = serde_json::from_value(v.clone())?;
            Ok(DomainState::Val(dto.to_mask(sig)?))
        }
        "compset" => Ok(DomainState::CompSet(val_list(sig, v)?)),
        "tuple" => Ok(DomainState::Tuple(val_list(sig, v)?)),
        "model" => Ok(DomainState::Model(epistemic_model_from_json(
            Some(sig),
            v,
        )?)),
        other => Err(Error::Json(format!(
            "state kind must be \"val\", \"compset\", \"tuple\" or \"model\", got {other:?}"
        ))),
    }
}

pub fn domain_to_json(d: &Domain) -> Value {
    let sig = d.sig();
    let states = d
        .state_ids()
        .iter()
        .zip(d.states())
        .map(|(id, s)| {
            let (kind, val) = payload_to_json(sig, s);
            StateDto {
                id: id.clone(),
                kind,
                val,
            }
        })
        .collect();
    let transitions = d
        .transitions()
        .iter()
        .map(|&(s, a, t)| {
            (
                d.state_ids()[s].clone(),
                d.actions()[a].clone(),
                d.state_ids()[t].clone(),
            )
        })
        .collect();
    let obs = d
        .state_ids()
        .iter()
        .enumerate()
        .map(|(i, id)| (id.clone(), ObsDto::from_obs(sig, d.obs(i))))
        .collect();
    serde_json::to_value(DomainDto {
        props: sig.props().to_vec(),
        actions: d.actions().to_vec(),
        states,
        initial: d.state_ids()[d.initial()].clone(),
        transitions,
        obs,
        deterministic: d.is_flagged_deterministic(),
    })
    .expect("domain serialises")
}

pub fn domain_from_json(v: &Value) -> Result<Domain> {
    let dto: DomainDto = serde_json::from_value(v.clone())?;
    let sig = Signature::new(dto.props)?;
    let states = dto
        .states
        .iter()
        .map(|s| Ok((s.id.clone(), payload_from_json(&sig, &s.kind, &s.val)?)))
        .collect::<Result<Vec<_>>>()?;
    let obs = dto
        .obs
        .iter()
        .map(|(id, o)| Ok((id.clone(), o.to_obs(&sig)?)))
        .collect::<Result<Vec<_>>>()?;
    Domain::new(
        sig,
        dto.actions,
        states,
        &dto.initial,
        dto.transitions,
        obs,
        dto.deterministic,
    )
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum TraceItemDto {
    Action(String),
    Obs(ObsDto),
}

pub fn traces_to_json(sig: &Signature, traces: &[ObservationTrace]) -> Value {
    let all: Vec<Vec<TraceItemDto>> = traces
        .iter()
        .map(|t| {
            let mut items = Vec::with_capacity(t.obs.len() + t.actions.len());
            for (i, &o) in t.obs.iter().enumerate() {
                items.push(TraceItemDto::Obs(ObsDto::from_obs(sig, o)));
                if i < t.actions.len() {
                    items.push(TraceItemDto::Action(t.actions[i].clone()));
                }
            }
            items
        })
        .collect();
    serde_json::to_value(all).expect("traces serialise")
}

pub fn traces_from_json(sig: &Signature, v: &Value) -> Result<Vec<ObservationTrace>> {
    let all: Vec<Vec<TraceItemDto>> = serde_json::from_value(v.clone())?;
    let mut traces = Vec::with_capacity(all.len());
    for items in all {
        let mut obs = Vec::new();
        let mut actions = Vec::new();
        for (i, item) in items.iter().enumerate() {
            match (i % 2 == 0, item) {
                (true, TraceItemDto::Obs(o)) => obs.push(o.to_obs(sig)?),
                (false, TraceItemDto::Action(a)) => actions.push(a.clone()),
                _ => {
                    return Err(Error::MalformedTrace(
                        "trace must alternate observations and actions".to_string(),
                    ))
                }
            }
        }
        if obs.len() != actions.len() + 1 {
            return Err(Error::MalformedTrace(
                "trace must start and end with an observation".to_string(),
            ));
        }
        traces.push(ObservationTrace { obs, actions });
    }
    Ok(traces)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TransitionDto {
    from: ObsDto,
    action: String,
    to: ObsDto,
}

pub fn transitions_to_json(sig: &Signature, sigma: &[ObservedTransition]) -> Value {
    let all: Vec<TransitionDto> = sigma
        .iter()
        .map(|t| TransitionDto {
            from: ObsDto::from_obs(sig, t.from),
            action: t.action.clone(),
            to: ObsDto::from_obs(sig, t.to),
        })
        .collect();
    serde_json::to_value(all).expect("transitions serialise")
}

pub fn transitions_from_json(sig: &Signature, v: &Value) -> Result<Vec<ObservedTransition>> {
    let all: Vec<TransitionDto> = serde_json::from_value(v.clone())?;
    all.into_iter()
        .map(|t| {
            Ok(ObservedTransition {
                from: t.from.to_obs(sig)?,
                action: t.action,
                to: t.to.to_obs(sig)?,
            })
        })
        .collect()
}
