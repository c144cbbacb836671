/** The bundled engagement example. Kept verbatim in sync with the
 * service's fixture; the fixture-sync test enforces the match. */

export const USECASE_EXAMPLE: string = "# Cyber operation against an adversarial AI decision-support system\n# operating inside a hostile C2 network. The malware engagement risks\n# downstream outages in civilian services sharing the same data\n# infrastructure.\nscenario usecase\n\n# target system and components\nindividual sys1 : AIDSS DataDriven\nindividual ie1 : InferenceEngine\nindividual ds1 : Dataset\ndata sys1 hasAITechnique \"data-driven\"\ndata sys1 hasDefenseMechanism false\n\n# operation framing and engagement vector\nindividual op1 : MilitaryOperation\nindividual roe1 : RoE\nobject op1 isUsingRoE roe1\nindividual eng1 : CyberAttack\ndata eng1 hasCyberAttackStatus inactive\nobject eng1 hasTargetAISystem sys1\nindividual av1 : AttackVector\ndata av1 hasAttackVectorID 1002\nindividual vul1 : Vulnerability\nobject sys1 hasVulnerability vul1\nindividual exp1 : Exploit\nobject exp1 isExploitingVulnerability vul1\n\n# assessment metrics\nindividual dq1 : DataQualityMetric\ndata dq1 hasDataQuality 0.45\nobject sys1 isValidatedBy dq1\nobject dq1 isMetricUsedForAssessingEngagement eng1\nindividual lm1 : LikelihoodMetric\ndata lm1 hasProbability 0.81\nobject lm1 isMetricUsedForAssessingEngagement eng1\nindividual sev1 : SeverityMetric\ndata sev1 hasSeverity Severe\nobject sev1 isMetricUsedForAssessingEngagement eng1\nindividual tm1 : TemporalMetric\ndata tm1 hasDuration ShortTerm\nobject eng1 hasTemporalAssessment tm1\nindividual fm1 : ForceMetric\nobject fm1 isMetricUsedForAssessingEngagement eng1\nindividual sm1 : SpatialMetric\ndata sm1 hasSpread Regional\nobject eng1 hasSpatialAssessment sm1\n\n# shared computational backbone with civilian infrastructure\nindividual conn1 : Connection\ndata conn1 isSharedWithCivilianInfrastructure true\nobject sys1 hasConnection conn1\n\n# anticipated effects\nindividual cd1 : CollateralDamage\nobject conn1 isContributingToCollateralDamage cd1\nobject eng1 isProducingEffect cd1\nindividual eff1 : CivilianDigitalSystemDisruption\ndata eff1 hasCDOnCivilianDigitalSystemInfo \"public emergency response coordination platform outage\"\nobject eng1 isProducingEffect eff1\nindividual eff2 : CivilianDataDestruction\ndata eff2 hasCivilianDataAlterationLevel high\nobject eng1 isProducingEffect eff2\n\n# the engagement decision under assessment\nindividual dec1 : AssessmentDecision\nindividual dm1 : DecisionMaker\nobject dec1 isAssessedBy eng1\nobject dec1 isAssessedBy dm1\nobject dec1 hasLikelihoodMetric lm1\nobject dec1 hasSeverityMetric sev1\n";
