export * from './types.js';
export * from './api.js';
export * from './validation.js';
export * from './wizard.js';
export * from './play.js';
export * from './dashboard.js';
