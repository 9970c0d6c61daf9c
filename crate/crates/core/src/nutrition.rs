use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Per-serving nutrient quantities. Any field may be missing from the source.
///
/// Mass fields are grams, except `sodium`, which is milligrams. `calories`
/// is kilocalories.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct NutritionFacts {
    pub calories: Option<f64>,
    pub total_fat: Option<f64>,
    pub saturated_fat: Option<f64>,
    pub dietary_fiber: Option<f64>,
    pub protein: Option<f64>,
    pub carbohydrates: Option<f64>,
    pub sodium: Option<f64>,
}

/// The nutrient columns a menu table can carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Nutrient {
    Calories,
    TotalFat,
    SaturatedFat,
    DietaryFiber,
    Protein,
    Carbohydrates,
    Sodium,
}

impl Nutrient {
    pub const ALL: [Nutrient; 7] = [
        Nutrient::Calories,
        Nutrient::TotalFat,
        Nutrient::SaturatedFat,
        Nutrient::DietaryFiber,
        Nutrient::Protein,
        Nutrient::Carbohydrates,
        Nutrient::Sodium,
    ];

    pub fn field_name(self) -> &'static str {
        match self {
            Nutrient::Calories => "calories",
            Nutrient::TotalFat => "total_fat",
            Nutrient::SaturatedFat => "saturated_fat",
            Nutrient::DietaryFiber => "dietary_fiber",
            Nutrient::Protein => "protein",
            Nutrient::Carbohydrates => "carbohydrates",
            Nutrient::Sodium => "sodium",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InvalidFacts {
    #[error("{field} must be finite and non-negative, got {value}")]
    OutOfRange { field: &'static str, value: f64 },
    #[error("saturated fat {saturated} g exceeds total fat {total} g")]
    SaturatedExceedsTotal { saturated: f64, total: f64 },
}

impl NutritionFacts {
    pub fn get(&self, nutrient: Nutrient) -> Option<f64> {
        match nutrient {
            Nutrient::Calories => self.calories,
            Nutrient::TotalFat => self.total_fat,
            Nutrient::SaturatedFat => self.saturated_fat,
            Nutrient::DietaryFiber => self.dietary_fiber,
            Nutrient::Protein => self.protein,
            Nutrient::Carbohydrates => self.carbohydrates,
            Nutrient::Sodium => self.sodium,
        }
    }

    pub fn set(&mut self, nutrient: Nutrient, value: Option<f64>) {
        let slot = match nutrient {
            Nutrient::Calories => &mut self.calories,
            Nutrient::TotalFat => &mut self.total_fat,
            Nutrient::SaturatedFat => &mut self.saturated_fat,
            Nutrient::DietaryFiber => &mut self.dietary_fiber,
            Nutrient::Protein => &mut self.protein,
            Nutrient::Carbohydrates => &mut self.carbohydrates,
            Nutrient::Sodium => &mut self.sodium,
        };
        *slot = value;
    }

    pub fn validate(&self) -> Result<(), InvalidFacts> {
        for nutrient in Nutrient::ALL {
            if let Some(value) = self.get(nutrient) {
                if !value.is_finite() || value < 0.0 {
                    return Err(InvalidFacts::OutOfRange {
                        field: nutrient.field_name(),
                        value,
                    });
                }
            }
        }
        if let (Some(saturated), Some(total)) = (self.saturated_fat, self.total_fat) {
            if saturated > total {
                return Err(InvalidFacts::SaturatedExceedsTotal { saturated, total });
            }
        }
        Ok(())
    }
}
